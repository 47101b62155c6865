#include "expresponse/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "expresponse/errors.hpp"

namespace expresponse {

using nlohmann::json;

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_matrix(const json& rows, Eigen::Index n, Eigen::Index b, const char* key) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
    throw SchemaError(fmt::format("{}: expected {} rows", key, n));
  Eigen::MatrixXd m(n, b);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != b)
      throw SchemaError(fmt::format("{}[{}]: expected {} entries", key, i, b));
    for (Eigen::Index j = 0; j < b; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw SchemaError(fmt::format("{}[{}][{}]: expected number", key, i, j));
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

std::string history_to_json(const History& history) {
  json root = {{"n", history.agents()},
               {"b", history.levels()},
               {"rounds_elapsed", history.rounds_elapsed},
               {"offered", matrix_rows(history.offered)},
               {"success", matrix_rows(history.success)}};
  return root.dump(2);
}

History history_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("history: ") + e.what());
  }
  for (const char* key : {"n", "b", "rounds_elapsed"})
    if (!root.contains(key) || !root[key].is_number_integer())
      throw SchemaError(fmt::format("{}: expected integer", key));
  for (const char* key : {"offered", "success"})
    if (!root.contains(key)) throw SchemaError(fmt::format("{}: missing", key));

  const auto n = root["n"].get<Eigen::Index>();
  const auto b = root["b"].get<int>();
  if (n < 0 || b < 0) throw SchemaError("n, b: must be non-negative");
  History h(n, b);
  h.rounds_elapsed = root["rounds_elapsed"].get<std::int64_t>();
  h.offered = rows_matrix(root["offered"], n, b, "offered");
  h.success = rows_matrix(root["success"], n, b, "success");
  if ((h.success.array() > h.offered.array()).any() || (h.success.array() < 0.0).any())
    throw ConsistencyError("history: success mass outside [0, offered]");
  return h;
}

void write_trace_csv(std::ostream& out, const RegretTrace& trace, const std::vector<Allocation>& allocations) {
  if (allocations.size() != trace.batches()) throw DimensionError("write_trace_csv: one allocation per batch");
  const Eigen::Index n = allocations.empty() ? 0 : allocations.front().size();
  out << "t,regret_cum,regret_round";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",c_" << i;
  out << '\n';
  for (std::size_t k = 0; k < trace.batches(); ++k) {
    out << fmt::format("{},{:.10f},{:.10f}", trace.t[k], trace.cumulative_regret[k], trace.per_round_regret[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << allocations[k].units(i);
    out << '\n';
  }
}

std::string bandit_summary_json(const BanditConfig& config, const BanditResult& result) {
  const RegretTrace& tr = result.trace;
  json root = {
      {"config",
       {{"budget", config.budget},
        {"n_agents", config.n_agents},
        {"batch_size", config.batch_size},
        {"horizon", config.effective_horizon()},
        {"rng_seed", config.rng_seed},
        {"weighted", config.weighted},
        {"lambda_max", config.rate_grid.lambda_max},
        {"grid_step", config.rate_grid.step}}},
      {"lambda_hat", vector_json(result.state.lambda_hat)},
      {"lambda_hat_plus", vector_json(result.state.lambda_hat_plus)},
      {"lambda_hat_minus", vector_json(result.state.lambda_hat_minus)},
      {"per_round_optimal", tr.per_round_optimal},
      {"total_regret", tr.cumulative_regret.empty() ? 0.0 : tr.cumulative_regret.back()},
      {"mean_regret_first_10pct", tr.mean_regret_head(0.1)},
      {"mean_regret_last_10pct", tr.mean_regret_tail(0.1)},
      {"mean_achieved_last_10pct", tr.mean_achieved_tail(0.1)},
      {"batches", tr.batches()},
  };
  return root.dump(2);
}

void write_windows_csv(std::ostream& out, const std::vector<WindowRecord>& windows) {
  for (std::size_t k = 0; k < kWindowCsvColumns.size(); ++k) out << (k ? "," : "") << kWindowCsvColumns[k];
  out << '\n';
  for (const auto& w : windows)
    for (const auto& o : w.observations)
      out << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.8f},{},{:.6f}\n", w.week, w.window, o.group, o.peak_rank,
                         o.baseline_usage, o.observed_usage, o.success_prob, w.units(o.group), w.penalty);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw SchemaError("csv: missing column " + name);
}

CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv: empty input");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size())
      throw SchemaError(fmt::format("csv: row {} has {} cells, header has {}", table.rows.size() + 1, cells.size(),
                                    table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out.flush()) throw IoError("write failed: " + path);
}

}  // namespace expresponse

#pragma once

// Serialization: History checkpoints as JSON, traces and window logs as CSV.
// Every number is printed with fixed precision so reruns are byte-identical.

#include <iosfwd>
#include <string>
#include <vector>

#include "expresponse/bandit.hpp"
#include "expresponse/estimator.hpp"
#include "expresponse/gridsim.hpp"

namespace expresponse {

// {"n": .., "b": .., "rounds_elapsed": .., "offered": [[..], ..], "success": [[..], ..]}
// with one inner array per agent, levels 1..b left to right.
std::string history_to_json(const History& history);
History history_from_json(const std::string& text);

/// Header: t,regret_cum,regret_round,c_1..c_n. One row per batch.
void write_trace_csv(std::ostream& out, const RegretTrace& trace, const std::vector<Allocation>& allocations);

/// Final estimates, totals and the run configuration.
std::string bandit_summary_json(const BanditConfig& config, const BanditResult& result);

inline const std::vector<std::string> kWindowCsvColumns{
    "week", "window", "group", "peak_rank", "baseline", "observed", "success_prob", "discount_units", "penalty"};

/// One row per (window, group, peak). penalty repeats the window-level charge.
void write_windows_csv(std::ostream& out, const std::vector<WindowRecord>& windows);

// Minimal reader for the files written here: comma-separated, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws SchemaError when absent
};
CsvTable read_csv(std::istream& in);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace expresponse

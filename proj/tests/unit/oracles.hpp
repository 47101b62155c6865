#pragma once

// Reference values computed once with 40-digit arbitrary-precision arithmetic
// and frozen here. Tolerances are absolute.

namespace oracle {

inline constexpr double kTol = 1e-12;

inline constexpr double p_half_two = 0.6321205588285576784;          // 1 - e^-1
inline constexpr double jump_half_zero = 0.3934693402873665764;      // 1 - e^-0.5
inline constexpr double jump_half_one = 0.2386512185411911020;       // e^-0.5 - e^-1
inline constexpr double reduction_30 = 0.7768698398515701711;        // rates {0.5, 0.1}, units {3, 0}
inline constexpr double reduction_41 = 0.9598272987274277349;        // rates {0.5, 0.1}, units {4, 1}
inline constexpr double pair_02 = 0.3625384938440362827;             // 2 (1 - e^-0.2)
inline constexpr double regret_30_03 = 0.5176880605332880371;        // (1 - e^-1.5) - (1 - e^-0.3)
inline constexpr double weighted_four_groups = 71.45868875641539083; // rate 0.3, usage 50/25/12/12, blocks 4/2/1/1, b=15
inline constexpr double neg_log_03 = 1.2039728043259359926;          // -ln 0.3

// Default curve, no discounts, no noise: all-group peaks and per-window charge.
inline constexpr double peak1_total = 143.5500000210073037;
inline constexpr double peak2_total = 138.6000000221129512;
inline constexpr double no_discount_penalty = 56430.00000331694268;

}  // namespace oracle

#pragma once

#include <string>

#include "json.hpp"

#include "tubenav/abstraction.hpp"
#include "tubenav/synthesis.hpp"

namespace tubenav {

using OrderedJson = nlohmann::ordered_json;

// Exact rationals are serialized as {"num": p, "den": q} (canonical form).
OrderedJson rat_to_json(const Rat& r);
Rat rat_from_json(const OrderedJson& j);

OrderedJson wts_to_json(const WtsBuildResult& result);
Wts wts_from_json(const OrderedJson& j);

OrderedJson plan_to_json(const TimedPlan& plan);
TimedPlan plan_from_json(const OrderedJson& j);

OrderedJson timed_word_to_json(const TimedWord& word);

// Per-leg summary (verdicts, tube statistics, stamps) without trajectories.
OrderedJson leg_summary_json(const TransitionResult& leg, const TubeGains& gains);

// Writes one leg's sub-step log as CSV with columns
//   t, chi_*, v_*, chibar_*, vbar_*, u_*, ubar_*, d_*
// (one row per logged state; the input columns of the final row repeat the
// last applied input so every row is complete).
void write_leg_csv(const std::string& path, const TransitionResult& leg);

// Reads a leg CSV back and recomputes tube containment row by row:
// ‖χ−χ̄‖ ≤ r_e + tol and ‖v−v̄‖ ≤ r_v + tol for every row at or after the
// tube-entry row. Used by `report` to cross-check the stored verdict.
bool recheck_tube_from_csv(const std::string& path, const TubeGains& gains,
                           int entry_row, double tol = 1e-6);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
OrderedJson read_json_file(const std::string& path);
void write_json_file(const std::string& path, const OrderedJson& j);

}  // namespace tubenav

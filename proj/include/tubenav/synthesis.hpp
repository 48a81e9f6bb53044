#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubenav/abstraction.hpp"
#include "tubenav/mitl.hpp"
#include "tubenav/navigator.hpp"

namespace tubenav {

// One node of the product 𝒯 ⊗ TBA. The automaton runs a single never-reset
// clock (absolute time), so clock_values is always the singleton {stamp}.
struct ProductState {
  int region = 0;
  std::vector<int> tba_location;
  std::vector<Rat> clock_values;
  Rat stamp{0};
};

// One navigation goal of a synthesized plan: drive from `source` to `dest`,
// departing at `start` and arriving at `arrival` (exact stamps).
struct PlanLeg {
  int source = 0;
  int dest = 0;
  Rat start{0};
  Rat arrival{0};
};

// An accepting timed run mapped to a sequence of navigation goals.
struct TimedPlan {
  std::vector<TimedRunEntry> run;  // (RoI id, stamp), position 0 at stamp 0
  std::vector<PlanLeg> goals;      // run.size() - 1 legs
  std::string formula;             // canonical fragment rendering
  std::string formula_digest;      // FNV-1a 64-bit hex of `formula`
};

// FNV-1a 64-bit digest, rendered as 16 lowercase hex digits.
std::string fnv1a_digest(const std::string& text);

// Uniform-cost search over the product of the WTS and the TBA: nodes are
// (region, TBA location tuple) at an exact stamp; successors are WTS
// transitions with the automaton stepped on the destination's label set at
// the arrival stamp; a node is a goal when staying in its region forever
// satisfies the formula (suffix semantics). Returns the minimum-makespan
// plan, ties broken by fewer legs, then lexicographically smallest region
// route; absence of a plan is a valued result (nullopt), never an error.
// Exploration is pruned at stamps beyond horizon_bound plus the longest
// single-leg duration. When debug_dot is non-null it receives a GraphViz
// rendering of the explored product graph.
std::optional<TimedPlan> product_search(const Wts& wts, const Tba& tba,
                                        const Rat& horizon_bound,
                                        std::string* debug_dot = nullptr);

// Recomputes the plan's stamps through timed_run_of (throws std::logic_error
// on any mismatch — an internal-consistency failure), rebuilds the timed
// word from the WTS labels and runs it through the automaton.
bool verify_plan(const TimedPlan& plan, const Wts& wts, const Tba& tba);

// Execution of a plan on the closed-loop system.
struct ExecutionReport {
  std::vector<TransitionResult> legs;  // one per attempted leg, in order
  TimedWord planned_word;
  TimedWord realized_word;  // stamps from realized durations (d-independent)
  bool accepted = false;    // accepts(TBA from scenario.formula, realized word)
  bool aborted = false;     // a leg failed; `legs` holds the partial prefix
  std::string abort_reason;

  bool satisfied() const { return accepted && !aborted; }
};

// Runs navigate for each leg in sequence, chaining the real end states (the
// verification tail is skipped between legs), with absolute time and the
// disturbance sub-step counter carried across legs. The automaton is rebuilt
// from scenario.formula. A leg that ends infeasible aborts execution with a
// partial report.
ExecutionReport execute_plan(const TimedPlan& plan, const Scenario& scenario,
                             const RobotModel& model, const TubeGains& gains,
                             const FhocpConfig& config, const DisturbanceSignal& disturbance);

}  // namespace tubenav

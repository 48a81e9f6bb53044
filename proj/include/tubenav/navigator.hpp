#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tubenav/fhocp.hpp"
#include "tubenav/scenario.hpp"
#include "tubenav/tube.hpp"

namespace tubenav {

// Assumption 4: every pair of navigable RoI must leave room for the robot
// body plus the full tube diameter, i.e. ‖c_i − c_j‖ − (p_i + p_j) >
// 2𝔯 + 2d̃/√min{α₁,α₂}. Forbidden regions are exempt: they are never
// transit endpoints and are avoided as a union, so they may overlap.
struct Assumption4Report {
  struct Pair {
    int a = 0;
    int b = 0;
    double gap = 0.0;  // clearance minus the required bound (negative = fail)
  };
  double required = 0.0;  // 2𝔯 + 2d̃/√min{α₁,α₂}
  std::vector<Pair> pairs;     // every ordered-once safe pair, worst first
  std::vector<Pair> failures;  // subset with gap ≤ 0
  bool ok() const { return failures.empty(); }
};

Assumption4Report check_assumption4(const Scenario& scenario, const TubeGains& gains);

// Result of one navigation leg (transition attempt source → dest). The
// duration is Algorithm 1's firing instant k·h as an exact rational; the
// trajectories are logged at integration sub-step resolution.
struct TransitionResult {
  int source = 0;
  int dest = 0;
  Rat duration{0};
  StateTrajectory nominal_traj;
  StateTrajectory real_traj;
  bool feasible = false;
  std::vector<std::string> violations;  // empty iff feasible

  // Diagnostics beyond the core contract.
  int steps = 0;                     // firing step k (duration = k·h)
  double thr = 0.0;                  // ε/√λ_min(P)
  double max_e_tilde = 0.0;          // max ‖χ−χ̄‖ over the whole leg
  double max_v_tilde = 0.0;          // max ‖v−v̄‖
  bool tube_started_inside = true;
  int tube_entry_substep = -1;       // first sub-step with (ẽ,ṽ) in the tube
  bool tube_ok = true;
  bool workspace_ok = true;          // robot ball inside W at every log step
  bool velocity_ok = true;           // v ∈ 𝒱 at every log step
  bool forbidden_ok = true;          // no forbidden-RoI contact at any log step
  double tail_max_pos = 0.0;         // max ‖χ−χ_d‖ during the verification tail
  double tail_max_vel = 0.0;         // max ‖v‖ during the verification tail
  bool tail_ok = true;
  double min_forbidden_clearance = 0.0;  // min over time of dist − (p+𝔯)
  int unsafe_contacts = 0;               // robot ball overlapping unsafe RoI
  std::vector<double> costs;             // FHOCP cost per sampling instant
  std::vector<char> feasible_flags;      // FHOCP verdict per sampling instant
  int first_feasible_step = -1;
  std::vector<double> nominal_P_norms;   // ‖ξ̄‖_P per sampling instant
  int f_entry_step = -1;                 // first instant with ‖ξ̄‖_P ≤ ε
  bool f_exited_after_entry = false;
  MatrixXd u_bar_schedule;           // one ū₀ row per executed sampling instant
  std::vector<VectorXd> u_log;       // applied input per sub-step
  std::vector<VectorXd> u_bar_log;   // nominal input per sub-step
  std::vector<VectorXd> d_log;       // disturbance per sub-step
  VectorXd chi_end, v_end;           // real state at the firing instant
  VectorXd chi_bar_end, v_bar_end;   // nominal state at the firing instant
};

struct NavigateOptions {
  DisturbanceSignal disturbance;        // applied to the real system (default zero)
  double verification_tail = 2.0;       // seconds past the firing instant
  std::optional<double> max_duration;   // overrides scenario.max_leg_duration
  std::optional<VectorXd> chi_bar_start, v_bar_start;  // default: source center, rest
  double t0 = 0.0;                      // absolute start time (chained legs)
  std::int64_t disturbance_step0 = 0;   // sub-step counter offset (chained legs)
  std::optional<TerminalIngredients> terminal;  // precomputed per-destination design
  std::optional<TightenedSets> tightened;
};

// Builds the FHOCP configuration (h, T, N, weights) from the scenario.
FhocpConfig fhocp_config_from(const Scenario& scenario, const RobotModel& model);

// Terminal design for a leg into `dest`: the level ε is capped so that the
// Theorem 1 position bound keeps the robot ball strictly inside the RoI,
// ε/√λ_min(P) ≤ 0.9·(p − 𝔯 − r_e). Throws TerminalDesignError when the RoI
// is too small for the tube or no admissible level exists.
TerminalIngredients design_terminal_for_leg(const Scenario& scenario, const RobotModel& model,
                                            const TubeGains& gains, const Roi& dest,
                                            const Box& u_box);

// Algorithm 1's firing test on the nominal state: both ‖χ̄−χ_d‖₂ and ‖v̄‖₂
// at most ε/√λ_min(P).
bool steady_state_reached(const VectorXd& chi_bar, const VectorXd& v_bar,
                          const VectorXd& chi_d, const MatrixXd& P, double epsilon);

// Executes one leg: receding-horizon control toward dest's center until
// Algorithm 1 fires, then a verification tail checking the Theorem 1 bounds.
// The nominal system starts at the source center at rest (so durations are
// disturbance-independent); the real system starts at (chi_start, v_start)
// and is driven by ū₀ + κ saturated to 𝒰. Failures (timeout, divergence,
// forbidden contact, tube breach) are reported through `violations` with
// feasible=false, never thrown; design errors (empty tightened sets, no
// terminal level) propagate as exceptions.
TransitionResult navigate(const Scenario& scenario, const RobotModel& model,
                          const TubeGains& gains, const FhocpConfig& config, const Roi& source,
                          const Roi& dest, const VectorXd& chi_start, const VectorXd& v_start,
                          const NavigateOptions& options = {});

// Re-simulates a recorded leg under a different disturbance by replaying the
// stored ū schedule. The nominal trajectory is bit-identical to the
// reference's (it never sees the disturbance), so the duration carries over;
// only the real-system statistics are recomputed.
TransitionResult replay_leg(const Scenario& scenario, const RobotModel& model,
                            const TubeGains& gains, const FhocpConfig& config,
                            const TransitionResult& reference, const Roi& source,
                            const Roi& dest, const VectorXd& chi_start, const VectorXd& v_start,
                            const DisturbanceSignal& disturbance,
                            std::int64_t disturbance_step0 = 0);

}  // namespace tubenav

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tubenav/dynamics.hpp"
#include "tubenav/tube.hpp"

namespace tubenav {

class TerminalDesignError : public std::runtime_error {
 public:
  explicit TerminalDesignError(const std::string& what) : std::runtime_error(what) {}
};

struct FhocpConfig {
  double h = 0.1;   // sampling period
  double T = 1.2;   // prediction horizon (integer multiple of h)
  int substeps = 10;  // RK4 sub-steps per sampling interval
  MatrixXd Q;       // 2n×2n stage weight on ξ̄
  MatrixXd R;       // n×n stage weight on the input deviation
  int max_iters = 200;
  double step_tol = 1e-6;        // projected-gradient step-norm convergence
  double constraint_tol = 1e-6;  // post-hoc feasibility tolerance
  double mu0 = 1e4;              // initial quadratic-penalty weight
  double mu_max = 1e8;
  bool measured_init = false;  // solve from measured state instead of nominal

  int steps() const { return static_cast<int>(std::lround(T / h)); }
};

// Terminal ingredients at a target center χ_d: equilibrium feedforward u_eq
// (f(χ_d, 0, u_eq) = 0), LQR gain K of the linearization at (χ_d, 0, u_eq),
// Lyapunov-designed terminal weight P and terminal level ε. The terminal set
// is 𝓕 = {ξ̄ : ‖ξ̄‖_P ≤ ε}, on which the local controller u_eq + Kξ̄ is
// input-admissible and decreases ‖ξ̄‖²_P faster than −‖ξ̄‖²_Q̃.
struct TerminalIngredients {
  MatrixXd P;
  MatrixXd K;
  double epsilon = 0.0;
  VectorXd u_eq;
  double lambda_min_P = 0.0;
  double eps_bisect = 0.0;  // raw bisection result before any cap
  double beta = 1.05;

  // Radius of the Euclidean ball that contains 𝓕: ε/√λ_min(P).
  double euclidean_radius() const { return epsilon / std::sqrt(lambda_min_P); }
};

struct TerminalOptions {
  double beta = 1.05;
  int boundary_samples = 1000;
  std::uint64_t seed = 2024;
  double eps_min = 1e-4;          // bisection failure threshold
  std::optional<double> eps_cap;  // external cap on ε itself
  // Cap on the Euclidean radius ε/√λ_min(P) of the terminal set (applied
  // once P is known); used to keep the set inside the destination RoI.
  std::optional<double> euclidean_radius_cap;
};

// Throws TerminalDesignError naming the failed condition (no equilibrium
// input, unstabilizable linearization, or no ε ≥ eps_min satisfying the
// input-admissibility / decrease conditions on sampled level-set boundaries).
TerminalIngredients terminal_ingredients(const RobotModel& model, const VectorXd& chi_d,
                                         const MatrixXd& Q, const MatrixXd& R,
                                         const Box& u_box, const TerminalOptions& opts = {});

struct OcpSolution {
  MatrixXd controls;                // N×n piecewise-constant inputs
  std::vector<VectorXd> predicted;  // N+1 error-frame states on the h grid
  double cost = 0.0;                // objective (stage + terminal, no penalty)
  bool feasible = false;            // verified by the independent checker
  double max_violation = 0.0;
  std::string violation_kind;       // which constraint the checker flagged
  int iters = 0;
  double mu_final = 0.0;
};

// Direct single-shooting FHOCP in the error frame ξ = (χ − χ_d, v):
//   min ‖ξ̄(T)‖²_P + ∫ ‖ξ̄‖²_Q + ‖ū − u_eq‖²_R dt
// subject to the nominal dynamics, ξ̄ ∈ Ē×V̄ and ū ∈ Ū at every sub-step, and
// the terminal set 𝓕. State and obstacle constraints enter as quadratic
// penalties with μ-escalation; the returned feasibility flag comes from an
// independent re-integration, never from the optimizer's own report.
class Ocp {
 public:
  Ocp(const RobotModel& model, const FhocpConfig& config, const TerminalIngredients& term,
      const TightenedSets& tightened, VectorXd chi_d);

  // mu_hint lets a receding-horizon caller start the penalty weight where
  // the previous solve ended instead of re-climbing the escalation ladder.
  OcpSolution solve(const VectorXd& xi0, const std::optional<MatrixXd>& warm_start = std::nullopt,
                    std::optional<double> mu_hint = std::nullopt) const;

  // Independent feasibility check of a candidate control sequence: fresh
  // re-integration, every constraint tested at every sub-step.
  void check(const VectorXd& xi0, const MatrixXd& controls, double& max_violation,
             std::string& kind) const;

  // One h-interval rollout of the nominal error dynamics under constant u
  // (same integrator and sub-step count as the shooting rollout).
  VectorXd advance_nominal(const VectorXd& xi, const VectorXd& u) const;

  const TerminalIngredients& terminal() const { return term_; }
  const FhocpConfig& config() const { return config_; }
  const TightenedSets& tightened() const { return tightened_; }
  const VectorXd& chi_d() const { return chi_d_; }

 private:
  struct Accum {
    VectorXd xi;
    double cost = 0.0;
    double pen = 0.0;
  };

  // Integrate sampling intervals [i0, N) from state xi, accumulating stage
  // cost and penalty; returns the terminal state and totals (excluding the
  // terminal cost/penalty terms, which objective() adds). When prefix is
  // given (sized N+1) the accumulator at every interval boundary is stored.
  Accum roll_from(int i0, VectorXd xi, const MatrixXd& U, double cost0, double pen0,
                  std::vector<Accum>* prefix = nullptr) const;
  double penalty_at(const VectorXd& e, const VectorXd& v) const;
  double objective(const Accum& terminal_accum, double mu) const;
  MatrixXd clamp_controls(MatrixXd U) const;

  const RobotModel& model_;
  FhocpConfig config_;
  TerminalIngredients term_;
  TightenedSets tightened_;
  VectorXd chi_d_;
  double dt_;  // h / substeps
};

// Stateful warm-start wrapper used by the receding-horizon loop: shifts the
// previous solution one interval and appends the saturated local controller.
class RecedingHorizonController {
 public:
  explicit RecedingHorizonController(const Ocp& ocp) : ocp_(&ocp) {}

  OcpSolution plan_step(const VectorXd& xi_nominal);
  void reset() {
    warm_.reset();
    mu_hint_.reset();
  }

 private:
  const Ocp* ocp_;
  std::optional<MatrixXd> warm_;
  std::optional<double> mu_hint_;
};

}  // namespace tubenav

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tubenav/geometry.hpp"

namespace tubenav {

// Second-order robot model  χ̇ = v,  v̇ = f(χ,v,u) + d  with the uncertain
// part d excluded from f. Analytic derivative callbacks are optional; when
// absent, central finite differences (step 1e-6) are used.
struct RobotModel {
  using DynFn = std::function<VectorXd(const VectorXd&, const VectorXd&, const VectorXd&)>;
  using JacFn = std::function<MatrixXd(const VectorXd&, const VectorXd&, const VectorXd&)>;

  std::string name;
  int n = 2;
  DynFn f;
  JacFn dfdchi;  // optional; empty std::function means "use finite differences"
  JacFn dfdv;
  JacFn dfdu;
  Box velocity_box;  // 𝒱
  Box input_box;     // 𝒰
  double lipschitz_L = 0.0;  // declared L = max{L₁, L₂}
  double j_lower = 0.0;      // declared J̲ (Assumption 3)
};

struct Jacobians {
  MatrixXd dchi;
  MatrixXd dv;
  MatrixXd du;
};

// One classical RK4 step of the coupled (χ, v) system with u and d held
// constant over the step. Throws std::runtime_error on non-finite output.
void rk4_step(const RobotModel& model, VectorXd& chi, VectorXd& v, const VectorXd& u,
              const VectorXd& d, double dt);

Jacobians jacobians(const RobotModel& model, const VectorXd& chi, const VectorXd& v,
                    const VectorXd& u);

struct JLowerReport {
  double estimate = 0.0;      // min over samples of λ_min[(J+Jᵀ)/2]
  bool violated = false;      // estimate ≤ 0 (Assumption 3 fails outright)
  bool below_declared = false;  // estimate < declared j_lower (warning)
};

JLowerReport estimate_j_lower(const RobotModel& model, const Box& workspace, int samples,
                              std::uint64_t seed = 7);

struct LipschitzReport {
  double L1 = 0.0;  // max ‖∂f/∂χ‖₂
  double L2 = 0.0;  // max ‖∂f/∂v‖₂
  double L = 0.0;   // max{L₁, L₂}
  bool above_declared = false;  // L > declared lipschitz_L (warning)
};

LipschitzReport estimate_lipschitz(const RobotModel& model, const Box& workspace, int samples,
                                   std::uint64_t seed = 11);

// PBH stabilizability test of the Jacobian linearization at the origin
// (Assumption 2): every uncontrollable mode must be strictly stable.
bool check_stabilizability(const RobotModel& model);

// Builds (A, B) of the error-dynamics linearization at (χ_ref, v_ref, u_ref):
// A = [[0, I], [∂f/∂χ, ∂f/∂v]],  B = [[0], [∂f/∂u]].
void linearize(const RobotModel& model, const VectorXd& chi_ref, const VectorXd& v_ref,
               const VectorXd& u_ref, MatrixXd& A, MatrixXd& B);

// Bounded disturbance signal ‖d(t)‖₂ ≤ d̃. The uniform-random kind is a
// stateless hash of (seed, step index) so that trajectories are reproducible
// and independent of evaluation order: each integration sub-step holds one
// draw.
struct DisturbanceSignal {
  enum class Kind { Zero, Sinusoidal, UniformRandom };
  Kind kind = Kind::Zero;
  double bound = 0.0;  // d̃
  std::uint64_t seed = 0;

  // t is absolute time (used by the sinusoidal kind); step_index identifies
  // the integration sub-step (used by the random kind).
  VectorXd at(double t, std::int64_t step_index, int n) const;

  static DisturbanceSignal zero() { return {}; }
  static DisturbanceSignal sinusoidal(double d_tilde) {
    return {Kind::Sinusoidal, d_tilde, 0};
  }
  static DisturbanceSignal uniform_random(double d_tilde, std::uint64_t seed) {
    return {Kind::UniformRandom, d_tilde, seed};
  }
};

struct StateTrajectory {
  std::vector<double> times;
  std::vector<VectorXd> chis;
  std::vector<VectorXd> vs;

  void push(double t, const VectorXd& chi, const VectorXd& v) {
    times.push_back(t);
    chis.push_back(chi);
    vs.push_back(v);
  }
  std::size_t size() const { return times.size(); }
};

}  // namespace tubenav

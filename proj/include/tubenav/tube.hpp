#pragma once

#include <vector>

#include "tubenav/geometry.hpp"
#include "tubenav/scenario.hpp"

namespace tubenav {

// Quantities of the off-line tube design: the ancillary feedback gain k, the
// Young's-inequality parameter ρ, the decrease constants α₁, α₂ and the RCI
// tube radii (r_e for the position error ẽ, r_v for the velocity error ṽ).
struct TubeGains {
  double k = 0.0;
  double rho = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double r_e = 0.0;
  double r_v = 0.0;

  double min_alpha() const { return std::min(alpha1, alpha2); }
};

// Tightened constraint sets for one navigation leg, expressed in the error
// frame ξ = (χ − χ_d, v): Ē's box part and forbidden balls, V̄ and Ū.
struct TightenedSets {
  Box e_box_part;                 // workspace ⊖ 𝔯 ⊖ r_e, translated by −χ_d
  std::vector<Ball> e_forbidden;  // other RoI ⊕ (𝔯 + r_e), translated by −χ_d
  Box v_box;                      // 𝒱 ⊖ r_v
  Box u_box;                      // 𝒰 ⊖ k(r_e+r_v)   (or ⊖ u_headroom in monitor mode)
};

// Gain selection:
//   ρ = rho_margin · L/2,          (ρ > L/2 required)
//   k = k_margin · (1/J̲)[(1+2ρ)L + 5/4],
//   α₁ = 1 − L/(2ρ),  α₂ = kJ̲ − (1+2ρ)L − 5/4,
//   r_e = d̃/√min{α₁,α₂},  r_v = 2d̃/√min{α₁,α₂}.
// Margins must be > 1 so that α₁, α₂ > 0.
TubeGains design_gains(double L, double J_lower, double d_tilde, double rho_margin = 1.2,
                       double k_margin = 1.1);

// The ancillary state feedback κ = −k(e − ē) − k(v − v̄).
VectorXd ancillary_feedback(const TubeGains& gains, const VectorXd& e, const VectorXd& v,
                            const VectorXd& e_bar, const VectorXd& v_bar);

// Radius by which 𝒰 is eroded to get Ū: k(r_e+r_v) in guaranteed mode,
// u_headroom in monitor mode.
double input_tightening_radius(const Scenario& scenario, const TubeGains& gains);

// Gains from the scenario's margins and its declared L and J̲ (sampled
// estimates over the workspace when not declared).
TubeGains design_gains_for(const Scenario& scenario, const RobotModel& model);

// Builds the tightened sets for the leg source → dest with target center χ_d.
// Every RoI other than source and dest is forbidden during the transit.
// Throws EmptySetError naming the offending set on over-tightening.
TightenedSets tighten(const Scenario& scenario, const RobotModel& model,
                      const TubeGains& gains, const Roi& source, const Roi& dest,
                      const VectorXd& chi_d);

// Tube membership: ‖ẽ‖₂ ≤ r_e and ‖ṽ‖₂ ≤ r_v (closed balls).
bool tube_contains(const TubeGains& gains, const VectorXd& e_tilde, const VectorXd& v_tilde);

}  // namespace tubenav

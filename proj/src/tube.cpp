#include "tubenav/tube.hpp"

#include <cmath>

namespace tubenav {

TubeGains design_gains(double L, double J_lower, double d_tilde, double rho_margin,
                       double k_margin) {
  if (L <= 0 || J_lower <= 0 || d_tilde < 0)
    throw std::invalid_argument("design_gains: L, J_lower must be positive, d_tilde >= 0");
  if (rho_margin <= 1.0 || k_margin <= 1.0)
    throw std::invalid_argument("design_gains: margins must be > 1");
  TubeGains g;
  g.rho = rho_margin * L / 2.0;
  g.k = k_margin * ((1.0 + 2.0 * g.rho) * L + 1.25) / J_lower;
  g.alpha1 = 1.0 - L / (2.0 * g.rho);
  g.alpha2 = g.k * J_lower - (1.0 + 2.0 * g.rho) * L - 1.25;
  const double min_alpha = std::min(g.alpha1, g.alpha2);
  if (min_alpha <= 0)
    throw std::runtime_error("design_gains: margins produced non-positive alpha");
  g.r_e = d_tilde / std::sqrt(min_alpha);
  g.r_v = 2.0 * d_tilde / std::sqrt(min_alpha);
  return g;
}

VectorXd ancillary_feedback(const TubeGains& gains, const VectorXd& e, const VectorXd& v,
                            const VectorXd& e_bar, const VectorXd& v_bar) {
  if (e.size() != e_bar.size() || v.size() != v_bar.size() || e.size() != v.size())
    throw std::invalid_argument("ancillary_feedback: dimension mismatch");
  return -gains.k * (e - e_bar) - gains.k * (v - v_bar);
}

TightenedSets tighten(const Scenario& scenario, const RobotModel& model,
                      const TubeGains& gains, const Roi& source, const Roi& dest,
                      const VectorXd& chi_d) {
  TightenedSets t;
  const Box robot_free =
      erode_box_by_ball(scenario.workspace, scenario.robot_radius, "workspace (robot radius)");
  t.e_box_part =
      translate_set(erode_box_by_ball(robot_free, gains.r_e, "E (position error box)"), -chi_d);
  for (const Roi& roi : scenario.rois) {
    if (roi.id == source.id || roi.id == dest.id) continue;
    const double inflated = roi.radius + scenario.robot_radius + gains.r_e;
    t.e_forbidden.push_back(Ball(roi.center - chi_d, inflated));
  }
  t.v_box = erode_box_by_ball(model.velocity_box, gains.r_v, "V (velocity)");
  t.u_box =
      erode_box_by_ball(model.input_box, input_tightening_radius(scenario, gains), "U (input)");
  return t;
}

double input_tightening_radius(const Scenario& scenario, const TubeGains& gains) {
  return scenario.tube_mode == TubeMode::Guaranteed
             ? feedback_image_radius(gains.k, gains.r_e, gains.r_v)
             : scenario.u_headroom;
}

TubeGains design_gains_for(const Scenario& scenario, const RobotModel& model) {
  const double L = scenario.declared_L
                       ? *scenario.declared_L
                       : estimate_lipschitz(model, scenario.workspace, 4000).L;
  const double J = scenario.declared_J_lower
                       ? *scenario.declared_J_lower
                       : estimate_j_lower(model, scenario.workspace, 4000).estimate;
  return design_gains(L, J, scenario.d_tilde, scenario.rho_margin, scenario.k_margin);
}

bool tube_contains(const TubeGains& gains, const VectorXd& e_tilde, const VectorXd& v_tilde) {
  return e_tilde.norm() <= gains.r_e && v_tilde.norm() <= gains.r_v;
}

}  // namespace tubenav

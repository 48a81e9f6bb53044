#include "tubenav/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tubenav/rng.hpp"

namespace tubenav {

Assumption4Report check_assumption4(const Scenario& scenario, const TubeGains& gains) {
  Assumption4Report rep;
  rep.required =
      2.0 * scenario.robot_radius + 2.0 * scenario.d_tilde / std::sqrt(gains.min_alpha());
  // The separation requirement applies to pairs of navigable RoI: transit
  // legs must fit the tube between them and park inside either one.
  // Forbidden regions may touch or overlap each other (or a safe RoI); they
  // only ever act as obstacles and are avoided as a union.
  const std::vector<int> safe = scenario.safe_roi_ids();
  for (std::size_t i = 0; i < safe.size(); ++i) {
    for (std::size_t j = i + 1; j < safe.size(); ++j) {
      const Roi& a = *scenario.roi_by_id(safe[i]);
      const Roi& b = *scenario.roi_by_id(safe[j]);
      const double clearance = (a.center - b.center).norm() - (a.radius + b.radius);
      rep.pairs.push_back({a.id, b.id, clearance - rep.required});
    }
  }
  std::sort(rep.pairs.begin(), rep.pairs.end(),
            [](const auto& x, const auto& y) { return x.gap < y.gap; });
  for (const auto& p : rep.pairs)
    if (p.gap <= 0.0) rep.failures.push_back(p);
  return rep;
}

FhocpConfig fhocp_config_from(const Scenario& scenario, const RobotModel& model) {
  FhocpConfig cfg;
  cfg.h = to_double(scenario.h);
  cfg.T = to_double(scenario.T);
  cfg.Q = MatrixXd(scenario.Q_diag.asDiagonal());
  cfg.R = MatrixXd(scenario.R_diag.asDiagonal());
  if (cfg.Q.rows() != 2 * model.n || cfg.R.rows() != model.n)
    throw std::invalid_argument("scenario weight dimensions do not match the model");
  return cfg;
}

TerminalIngredients design_terminal_for_leg(const Scenario& scenario, const RobotModel& model,
                                            const TubeGains& gains, const Roi& dest,
                                            const Box& u_box) {
  const double margin = dest.radius - scenario.robot_radius - gains.r_e;
  if (margin <= 0.0)
    throw TerminalDesignError(
        "destination RoI too small for the tube: radius must exceed the robot radius plus "
        "r_e");
  TerminalOptions opts;
  opts.euclidean_radius_cap = 0.9 * margin;
  opts.seed = splitmix64(scenario.seed + 0x9e3779b97f4a7c15ULL *
                                             static_cast<std::uint64_t>(dest.id + 1));
  const MatrixXd Q = MatrixXd(scenario.Q_diag.asDiagonal());
  const MatrixXd R = MatrixXd(scenario.R_diag.asDiagonal());
  return terminal_ingredients(model, dest.center, Q, R, u_box, opts);
}

bool steady_state_reached(const VectorXd& chi_bar, const VectorXd& v_bar,
                          const VectorXd& chi_d, const MatrixXd& P, double epsilon) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(P);
  const double thr = epsilon / std::sqrt(es.eigenvalues().minCoeff());
  return (chi_bar - chi_d).norm() <= thr && v_bar.norm() <= thr;
}

namespace {

// Shared sub-step simulation core for navigate and replay: advances the real
// system (ū₀ + κ saturated to 𝒰, disturbance d) and the nominal system (ū₀,
// d ≡ 0) in lockstep, logging trajectories and accumulating the statistics
// that become the leg's verdicts.
struct LegSim {
  const Scenario& sc;
  const RobotModel& model;
  const TubeGains& gains;
  const Roi& source;
  const Roi& dest;
  VectorXd chi_d;
  DisturbanceSignal dist;
  int substeps = 10;
  double dt = 0.01;
  TransitionResult* out = nullptr;

  VectorXd chi{}, v{}, chi_bar{}, v_bar{};
  double t = 0.0;
  std::int64_t sub_index = 0;
  int substep_counter = 0;  // counts logged states, initial state = 0
  bool in_tail = false;

  bool tube_breach_after_entry = false;
  bool workspace_breach = false;
  bool velocity_breach = false;
  bool forbidden_breach = false;

  void log_and_observe() {
    out->real_traj.push(t, chi, v);
    out->nominal_traj.push(t, chi_bar, v_bar);

    const double et = (chi - chi_bar).norm();
    const double vt = (v - v_bar).norm();
    out->max_e_tilde = std::max(out->max_e_tilde, et);
    out->max_v_tilde = std::max(out->max_v_tilde, vt);
    const bool inside = et <= gains.r_e + 1e-6 && vt <= gains.r_v + 1e-6;
    if (substep_counter == 0) out->tube_started_inside = inside;
    if (inside && out->tube_entry_substep < 0) out->tube_entry_substep = substep_counter;
    if (!inside && out->tube_entry_substep >= 0) tube_breach_after_entry = true;

    if (!ball_in_box(Ball(chi, sc.robot_radius), sc.workspace)) workspace_breach = true;
    if (!model.velocity_box.contains(v)) velocity_breach = true;

    for (const Roi& roi : sc.rois) {
      if (roi.id == source.id || roi.id == dest.id) continue;
      const double clearance = (chi - roi.center).norm() - (roi.radius + sc.robot_radius);
      out->min_forbidden_clearance = std::min(out->min_forbidden_clearance, clearance);
      if (clearance < -1e-9) {
        forbidden_breach = true;
        if (sc.roi_is_unsafe(roi)) ++out->unsafe_contacts;
      }
    }

    if (in_tail) {
      out->tail_max_pos = std::max(out->tail_max_pos, (chi - chi_d).norm());
      out->tail_max_vel = std::max(out->tail_max_vel, v.norm());
    }
    ++substep_counter;
  }

  void advance_interval(const VectorXd& u_bar0) {
    const VectorXd zero = VectorXd::Zero(model.n);
    for (int m = 0; m < substeps; ++m) {
      const VectorXd kappa = ancillary_feedback(gains, chi, v, chi_bar, v_bar);
      const VectorXd u = model.input_box.clamp(u_bar0 + kappa);
      const VectorXd d = dist.at(t, sub_index, model.n);
      out->u_log.push_back(u);
      out->u_bar_log.push_back(u_bar0);
      out->d_log.push_back(d);
      rk4_step(model, chi, v, u, d, dt);
      rk4_step(model, chi_bar, v_bar, u_bar0, zero, dt);
      t += dt;
      ++sub_index;
      log_and_observe();
    }
  }
};

// Converts the accumulated flags into the violations list and final verdicts.
void finalize_verdicts(TransitionResult& out, const LegSim& sim, const Scenario& sc,
                       const TubeGains& gains, bool had_tail) {
  out.tube_ok = out.tube_entry_substep >= 0 && !sim.tube_breach_after_entry;
  if (!out.tube_ok) {
    if (out.tube_entry_substep < 0)
      out.violations.push_back("tube never entered: (e~,v~) stayed outside (r_e, r_v)");
    else if (out.tube_started_inside)
      out.violations.push_back("tube containment violated (Lemma 2 bound exceeded)");
    else
      out.violations.push_back("tube exited after entry");
  }
  out.workspace_ok = !sim.workspace_breach;
  out.velocity_ok = !sim.velocity_breach;
  out.forbidden_ok = !sim.forbidden_breach;
  if (sim.workspace_breach)
    out.violations.push_back("robot ball left the workspace");
  if (sim.velocity_breach) out.violations.push_back("velocity left V");
  if (sim.forbidden_breach)
    out.violations.push_back("forbidden RoI contact during transit");
  if (had_tail) {
    const double min_alpha = gains.min_alpha();
    const double pos_bound = out.thr + sc.d_tilde / std::sqrt(min_alpha);
    const double vel_bound = out.thr + 2.0 * sc.d_tilde / std::sqrt(min_alpha);
    out.tail_ok = out.tail_max_pos <= pos_bound + 1e-6 && out.tail_max_vel <= vel_bound + 1e-6;
    if (!out.tail_ok)
      out.violations.push_back("Theorem 1 steady-state bounds violated during the tail");
  }
  out.feasible = out.violations.empty();
}

VectorXd error_state(const LegSim& sim, const VectorXd& chi_d) {
  VectorXd xi(2 * sim.model.n);
  xi.head(sim.model.n) = sim.chi_bar - chi_d;
  xi.tail(sim.model.n) = sim.v_bar;
  return xi;
}

}  // namespace

TransitionResult navigate(const Scenario& scenario, const RobotModel& model,
                          const TubeGains& gains, const FhocpConfig& config, const Roi& source,
                          const Roi& dest, const VectorXd& chi_start, const VectorXd& v_start,
                          const NavigateOptions& options) {
  TransitionResult out;
  out.source = source.id;
  out.dest = dest.id;
  out.min_forbidden_clearance = std::numeric_limits<double>::infinity();
  const int n = model.n;
  const VectorXd chi_d = dest.center;

  const TightenedSets ts = options.tightened
                               ? *options.tightened
                               : tighten(scenario, model, gains, source, dest, chi_d);
  const TerminalIngredients term =
      options.terminal ? *options.terminal
                       : design_terminal_for_leg(scenario, model, gains, dest, ts.u_box);
  out.thr = term.euclidean_radius();

  Ocp ocp(model, config, term, ts, chi_d);
  RecedingHorizonController ctrl(ocp);

  LegSim sim{scenario, model,  gains, source, dest, chi_d,
             options.disturbance, config.substeps, config.h / config.substeps, &out};
  sim.chi = chi_start;
  sim.v = v_start;
  sim.chi_bar = options.chi_bar_start.value_or(source.center);
  sim.v_bar = options.v_bar_start.value_or(VectorXd::Zero(n));
  sim.t = options.t0;
  sim.sub_index = options.disturbance_step0;
  sim.log_and_observe();

  if ((chi_start - source.center).norm() > source.radius - scenario.robot_radius + 1e-9)
    out.violations.push_back("start state's robot ball not inside the source RoI");

  const double max_dur = options.max_duration.value_or(scenario.max_leg_duration);
  const int max_steps = static_cast<int>(std::ceil(max_dur / config.h - 1e-9));
  std::vector<VectorXd> schedule;
  std::string abort;
  int fire = -1;

  const auto observe_instant = [&](int k) {
    const VectorXd xi_bar = error_state(sim, chi_d);
    const double pn = std::sqrt(std::max(xi_bar.dot(term.P * xi_bar), 0.0));
    out.nominal_P_norms.push_back(pn);
    if (pn <= term.epsilon + 1e-12 && out.f_entry_step < 0) out.f_entry_step = k;
    if (pn > term.epsilon + 1e-9 && out.f_entry_step >= 0) out.f_exited_after_entry = true;
  };

  for (int k = 0;; ++k) {
    observe_instant(k);
    if (k >= 1 && steady_state_reached(sim.chi_bar, sim.v_bar, chi_d, term.P, term.epsilon)) {
      fire = k;
      break;
    }
    if (k >= max_steps) {
      abort = "timeout: Algorithm 1 did not fire within " + std::to_string(max_dur) + " s";
      break;
    }
    OcpSolution sol;
    try {
      sol = ctrl.plan_step(error_state(sim, chi_d));
    } catch (const std::exception& e) {
      abort = std::string("solver failure: ") + e.what();
      break;
    }
    out.costs.push_back(sol.cost);
    out.feasible_flags.push_back(sol.feasible ? 1 : 0);
    if (sol.feasible && out.first_feasible_step < 0) out.first_feasible_step = k;
    const VectorXd u0 = sol.controls.row(0).transpose();
    schedule.push_back(u0);
    try {
      sim.advance_interval(u0);
    } catch (const std::exception& e) {
      abort = std::string("integration diverged: ") + e.what();
      break;
    }
    if (!scenario.workspace.contains(sim.chi_bar)) {
      abort = "nominal trajectory left the workspace";
      break;
    }
  }

  if (fire < 0) {
    out.violations.push_back(abort);
    finalize_verdicts(out, sim, scenario, gains, /*had_tail=*/false);
    out.feasible = false;
    return out;
  }

  out.steps = fire;
  out.duration = Rat(fire) * scenario.h;
  out.chi_end = sim.chi;
  out.v_end = sim.v;
  out.chi_bar_end = sim.chi_bar;
  out.v_bar_end = sim.v_bar;
  if ((sim.chi - chi_d).norm() > dest.radius - scenario.robot_radius + 1e-9)
    out.violations.push_back("robot ball not inside the destination RoI at the firing instant");

  const int tail_steps = static_cast<int>(std::lround(options.verification_tail / config.h));
  sim.in_tail = true;
  for (int j = 0; j < tail_steps; ++j) {
    OcpSolution sol;
    try {
      sol = ctrl.plan_step(error_state(sim, chi_d));
    } catch (const std::exception& e) {
      out.violations.push_back(std::string("solver failure during tail: ") + e.what());
      break;
    }
    out.costs.push_back(sol.cost);
    out.feasible_flags.push_back(sol.feasible ? 1 : 0);
    if (sol.feasible && out.first_feasible_step < 0) out.first_feasible_step = fire + j;
    const VectorXd u0 = sol.controls.row(0).transpose();
    schedule.push_back(u0);
    try {
      sim.advance_interval(u0);
    } catch (const std::exception& e) {
      out.violations.push_back(std::string("integration diverged during tail: ") + e.what());
      break;
    }
    observe_instant(fire + j + 1);
  }

  out.u_bar_schedule.resize(static_cast<Eigen::Index>(schedule.size()), n);
  for (std::size_t r = 0; r < schedule.size(); ++r)
    out.u_bar_schedule.row(static_cast<Eigen::Index>(r)) = schedule[r].transpose();
  finalize_verdicts(out, sim, scenario, gains, tail_steps > 0);
  return out;
}

TransitionResult replay_leg(const Scenario& scenario, const RobotModel& model,
                            const TubeGains& gains, const FhocpConfig& config,
                            const TransitionResult& reference, const Roi& source,
                            const Roi& dest, const VectorXd& chi_start, const VectorXd& v_start,
                            const DisturbanceSignal& disturbance,
                            std::int64_t disturbance_step0) {
  TransitionResult out;
  out.source = reference.source;
  out.dest = reference.dest;
  out.steps = reference.steps;
  out.duration = reference.duration;
  out.thr = reference.thr;
  out.costs = reference.costs;
  out.feasible_flags = reference.feasible_flags;
  out.first_feasible_step = reference.first_feasible_step;
  out.u_bar_schedule = reference.u_bar_schedule;
  out.min_forbidden_clearance = std::numeric_limits<double>::infinity();
  const int n = model.n;
  const VectorXd chi_d = dest.center;

  LegSim sim{scenario, model,  gains, source, dest, chi_d,
             disturbance, config.substeps, config.h / config.substeps, &out};
  sim.chi = chi_start;
  sim.v = v_start;
  sim.chi_bar = source.center;
  sim.v_bar = VectorXd::Zero(n);
  sim.sub_index = disturbance_step0;
  sim.log_and_observe();

  const int rows = static_cast<int>(reference.u_bar_schedule.rows());
  const bool had_tail = rows > reference.steps;
  for (int r = 0; r <= rows; ++r) {
    if (r == reference.steps) {
      out.chi_end = sim.chi;
      out.v_end = sim.v;
      out.chi_bar_end = sim.chi_bar;
      out.v_bar_end = sim.v_bar;
      if ((sim.chi - chi_d).norm() > dest.radius - scenario.robot_radius + 1e-9)
        out.violations.push_back(
            "robot ball not inside the destination RoI at the firing instant");
      sim.in_tail = true;
    }
    if (r == rows) break;
    sim.advance_interval(reference.u_bar_schedule.row(r).transpose());
  }
  finalize_verdicts(out, sim, scenario, gains, had_tail);
  return out;
}

}  // namespace tubenav

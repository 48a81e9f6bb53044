#include "tubenav/fhocp.hpp"

#include <algorithm>
#include <cmath>

#include "tubenav/lqr.hpp"
#include "tubenav/rng.hpp"

namespace tubenav {

namespace {

// Newton solve of f(χ_d, 0, u) = 0 for the equilibrium feedforward input.
VectorXd solve_equilibrium_input(const RobotModel& model, const VectorXd& chi_d) {
  const int n = model.n;
  VectorXd u = VectorXd::Zero(n);
  const VectorXd v0 = VectorXd::Zero(n);
  for (int it = 0; it < 60; ++it) {
    const VectorXd g = model.f(chi_d, v0, u);
    if (g.lpNorm<Eigen::Infinity>() < 1e-12) return u;
    const MatrixXd J = jacobians(model, chi_d, v0, u).du;
    Eigen::FullPivLU<MatrixXd> lu(J);
    if (!lu.isInvertible())
      throw TerminalDesignError("equilibrium Newton: singular input Jacobian at target");
    u -= lu.solve(g);
    if (!u.allFinite()) throw TerminalDesignError("equilibrium Newton diverged at target");
  }
  throw TerminalDesignError("equilibrium Newton did not converge at target");
}

}  // namespace

TerminalIngredients terminal_ingredients(const RobotModel& model, const VectorXd& chi_d,
                                         const MatrixXd& Q, const MatrixXd& R,
                                         const Box& u_box, const TerminalOptions& opts) {
  const int n = model.n;
  TerminalIngredients out;
  out.beta = opts.beta;
  out.u_eq = solve_equilibrium_input(model, chi_d);
  if (!u_box.contains(out.u_eq))
    throw TerminalDesignError(
        "equilibrium input lies outside the tightened input set; target not holdable");

  MatrixXd A, B;
  linearize(model, chi_d, VectorXd::Zero(n), out.u_eq, A, B);

  MatrixXd P_are;
  try {
    P_are = solve_care(A, B, Q, R);
  } catch (const std::runtime_error& e) {
    throw TerminalDesignError(std::string("Riccati design failed at target: ") + e.what());
  }
  out.K = -R.ldlt().solve(B.transpose() * P_are);

  const MatrixXd Acl = A + B * out.K;
  const MatrixXd Qt = Q + out.K.transpose() * R * out.K;
  out.P = solve_lyapunov(Acl, -opts.beta * Qt);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(out.P);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0)
    throw TerminalDesignError("terminal weight P is not positive definite");
  out.lambda_min_P = es.eigenvalues().minCoeff();
  const MatrixXd P_inv_sqrt = es.operatorInverseSqrt();

  // Unit-level boundary directions: ζ with ‖ζ‖_P = 1, so ε·ζ sweeps the
  // boundary of the candidate terminal set.
  Rng rng(opts.seed);
  std::vector<VectorXd> zetas;
  zetas.reserve(static_cast<std::size_t>(opts.boundary_samples));
  for (int i = 0; i < opts.boundary_samples; ++i) {
    VectorXd y(2 * n);
    for (int j = 0; j < 2 * n; ++j) y[j] = rng.normal();
    if (y.norm() < 1e-12) y.setOnes();
    zetas.push_back(P_inv_sqrt * (y / y.norm()));
  }

  const auto valid = [&](double eps) {
    for (const VectorXd& zeta : zetas) {
      const VectorXd xi = eps * zeta;
      const VectorXd u = out.u_eq + out.K * xi;
      if (!u_box.contains(u)) return false;
      VectorXd xidot(2 * n);
      xidot.head(n) = xi.tail(n);
      xidot.tail(n) = model.f(chi_d + xi.head(n), xi.tail(n), u);
      const double lhs = 2.0 * xi.dot(out.P * xidot);
      const double rhs = -xi.dot(Qt * xi);
      if (lhs > rhs + 1e-10 * std::max(1.0, eps * eps)) return false;
    }
    return true;
  };

  // Bracket the largest valid level, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  if (valid(hi)) {
    while (hi < 64.0 && valid(2.0 * hi)) hi *= 2.0;
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 60 && (hi - lo) > 1e-9 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (valid(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.eps_bisect = lo;
  if (out.eps_bisect < opts.eps_min)
    throw TerminalDesignError(
        "no admissible terminal level: local controller leaves the input set or fails the "
        "decrease condition arbitrarily close to the target");

  out.epsilon = out.eps_bisect;
  std::optional<double> cap = opts.eps_cap;
  if (opts.euclidean_radius_cap) {
    const double from_radius = *opts.euclidean_radius_cap * std::sqrt(out.lambda_min_P);
    cap = cap ? std::min(*cap, from_radius) : from_radius;
  }
  if (cap && *cap < out.epsilon) {
    out.epsilon = *cap;
    if (out.epsilon < opts.eps_min)
      throw TerminalDesignError("terminal level cap below the minimum usable level");
    // The bisection certifies one level, not all smaller ones; re-verify the
    // capped level and two interior sublevels.
    for (double f : {1.0, 0.5, 0.25}) {
      if (!valid(f * out.epsilon))
        throw TerminalDesignError("capped terminal level failed re-verification");
    }
  }
  return out;
}

Ocp::Ocp(const RobotModel& model, const FhocpConfig& config, const TerminalIngredients& term,
         const TightenedSets& tightened, VectorXd chi_d)
    : model_(model),
      config_(config),
      term_(term),
      tightened_(tightened),
      chi_d_(std::move(chi_d)) {
  if (config_.substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const double steps = config_.T / config_.h;
  if (std::abs(steps - std::lround(steps)) > 1e-9)
    throw std::invalid_argument("horizon T must be an integer multiple of h");
  dt_ = config_.h / config_.substeps;
}

MatrixXd Ocp::clamp_controls(MatrixXd U) const {
  for (int i = 0; i < U.rows(); ++i)
    U.row(i) = tightened_.u_box.clamp(U.row(i).transpose()).transpose();
  return U;
}

double Ocp::penalty_at(const VectorXd& e, const VectorXd& v) const {
  double pen = 0.0;
  for (int j = 0; j < e.size(); ++j) {
    const double lo = tightened_.e_box_part.lower[j] - e[j];
    if (lo > 0) pen += lo * lo;
    const double hi = e[j] - tightened_.e_box_part.upper[j];
    if (hi > 0) pen += hi * hi;
    const double vlo = tightened_.v_box.lower[j] - v[j];
    if (vlo > 0) pen += vlo * vlo;
    const double vhi = v[j] - tightened_.v_box.upper[j];
    if (vhi > 0) pen += vhi * vhi;
  }
  for (const Ball& ball : tightened_.e_forbidden) {
    const double depth = ball.radius - (e - ball.center).norm();
    if (depth > 0) pen += depth * depth;
  }
  return pen;
}

Ocp::Accum Ocp::roll_from(int i0, VectorXd xi, const MatrixXd& U, double cost0, double pen0,
                          std::vector<Accum>* prefix) const {
  const int n = model_.n;
  const int N = config_.steps();
  const VectorXd d = VectorXd::Zero(n);
  VectorXd chi = chi_d_ + xi.head(n);
  VectorXd v = xi.tail(n);
  double cost = cost0;
  double pen = pen0;
  const auto boundary = [&](void) {
    VectorXd b(2 * n);
    b.head(n) = chi - chi_d_;
    b.tail(n) = v;
    return Accum{b, cost, pen};
  };
  for (int i = i0; i < N; ++i) {
    if (prefix) (*prefix)[static_cast<std::size_t>(i)] = boundary();
    const VectorXd u = U.row(i).transpose();
    const VectorXd du = u - term_.u_eq;
    for (int m = 0; m < config_.substeps; ++m) {
      // Rectangle-rule stage cost at the sub-step start; penalties sampled
      // at the sub-step end.
      VectorXd xi_now(2 * n);
      xi_now.head(n) = chi - chi_d_;
      xi_now.tail(n) = v;
      cost += dt_ * (xi_now.dot(config_.Q * xi_now) + du.dot(config_.R * du));
      rk4_step(model_, chi, v, u, d, dt_);
      pen += penalty_at(chi - chi_d_, v);
    }
  }
  Accum acc = boundary();
  if (prefix) (*prefix)[static_cast<std::size_t>(N)] = acc;
  return acc;
}

double Ocp::objective(const Accum& a, double mu) const {
  const double vP = a.xi.dot(term_.P * a.xi);
  const double tv = std::max(vP - term_.epsilon * term_.epsilon, 0.0);
  return a.cost + vP + mu * (a.pen + tv * tv);
}

OcpSolution Ocp::solve(const VectorXd& xi0, const std::optional<MatrixXd>& warm_start,
                       std::optional<double> mu_hint) const {
  const int n = model_.n;
  const int N = config_.steps();

  MatrixXd U;
  if (warm_start && warm_start->rows() == N && warm_start->cols() == n) {
    U = clamp_controls(*warm_start);
  } else {
    U = clamp_controls(term_.u_eq.transpose().replicate(N, 1));
  }

  double mu = std::clamp(mu_hint.value_or(config_.mu0), config_.mu0, config_.mu_max);
  int iters = 0;
  double viol = 0.0;
  std::string kind;
  bool feasible = false;
  std::vector<Accum> pref(static_cast<std::size_t>(N) + 1);

  while (true) {
    roll_from(0, xi0, U, 0.0, 0.0, &pref);
    double F = objective(pref.back(), mu);

    double t = 0.05;
    while (iters < config_.max_iters) {
      // Forward-difference gradient with prefix reuse: perturbing U.row(i)
      // only requires re-integrating intervals [i, N).
      MatrixXd g(N, n);
      for (int i = 0; i < N; ++i) {
        const Accum& base = pref[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
          const double delta = 1e-6 * std::max(1.0, std::abs(U(i, j)));
          MatrixXd Up = U;
          Up(i, j) += delta;
          const Accum a = roll_from(i, base.xi, Up, base.cost, base.pen);
          g(i, j) = (objective(a, mu) - F) / delta;
        }
      }

      bool accepted = false;
      double step_inf = 0.0;
      for (int bt = 0; bt < 40; ++bt) {
        const MatrixXd Ucand = clamp_controls(U - t * g);
        const MatrixXd dU = Ucand - U;
        step_inf = dU.lpNorm<Eigen::Infinity>();
        if (step_inf < 1e-15) break;
        const double Fc = objective(roll_from(0, xi0, Ucand, 0.0, 0.0), mu);
        const double slope = (g.array() * dU.array()).sum();
        if (Fc <= F + 1e-4 * slope) {
          U = Ucand;
          accepted = true;
          t = std::min(t * 2.0, 100.0);
          break;
        }
        t *= 0.5;
        if (t < 1e-14) break;
      }
      if (!accepted) break;
      ++iters;
      roll_from(0, xi0, U, 0.0, 0.0, &pref);
      F = objective(pref.back(), mu);
      if (step_inf < config_.step_tol) break;
    }

    check(xi0, U, viol, kind);
    if (viol <= config_.constraint_tol) {
      feasible = true;
      break;
    }
    if (mu >= config_.mu_max || iters >= config_.max_iters) break;
    mu = std::min(mu * 10.0, config_.mu_max);
  }

  // Assemble the solution: predicted states on the h grid and the pure
  // (penalty-free) objective.
  OcpSolution sol;
  sol.controls = U;
  roll_from(0, xi0, U, 0.0, 0.0, &pref);
  sol.predicted.reserve(pref.size());
  for (const Accum& a : pref) sol.predicted.push_back(a.xi);
  const VectorXd& xiN = pref.back().xi;
  sol.cost = pref.back().cost + xiN.dot(term_.P * xiN);
  sol.feasible = feasible;
  sol.max_violation = viol;
  sol.violation_kind = feasible ? std::string() : kind;
  sol.iters = iters;
  sol.mu_final = mu;
  return sol;
}

void Ocp::check(const VectorXd& xi0, const MatrixXd& controls, double& max_violation,
                std::string& kind) const {
  const int n = model_.n;
  const int N = config_.steps();
  max_violation = 0.0;
  kind.clear();
  const auto note = [&](double v, const char* k) {
    if (v > max_violation) {
      max_violation = v;
      kind = k;
    }
  };
  const auto state_check = [&](const VectorXd& e, const VectorXd& v) {
    for (int j = 0; j < n; ++j) {
      note(tightened_.e_box_part.lower[j] - e[j], "e_box");
      note(e[j] - tightened_.e_box_part.upper[j], "e_box");
      note(tightened_.v_box.lower[j] - v[j], "v_box");
      note(v[j] - tightened_.v_box.upper[j], "v_box");
    }
    for (const Ball& ball : tightened_.e_forbidden)
      note(ball.radius - (e - ball.center).norm(), "e_forbidden");
  };

  VectorXd chi = chi_d_ + xi0.head(n);
  VectorXd v = xi0.tail(n);
  const VectorXd d = VectorXd::Zero(n);
  state_check(chi - chi_d_, v);
  for (int i = 0; i < N; ++i) {
    const VectorXd u = controls.row(i).transpose();
    for (int j = 0; j < n; ++j) {
      note(tightened_.u_box.lower[j] - u[j], "u_box");
      note(u[j] - tightened_.u_box.upper[j], "u_box");
    }
    for (int m = 0; m < config_.substeps; ++m) {
      rk4_step(model_, chi, v, u, d, dt_);
      state_check(chi - chi_d_, v);
    }
  }
  VectorXd xiN(2 * n);
  xiN.head(n) = chi - chi_d_;
  xiN.tail(n) = v;
  note(std::sqrt(std::max(xiN.dot(term_.P * xiN), 0.0)) - term_.epsilon, "terminal");
}

VectorXd Ocp::advance_nominal(const VectorXd& xi, const VectorXd& u) const {
  const int n = model_.n;
  VectorXd chi = chi_d_ + xi.head(n);
  VectorXd v = xi.tail(n);
  const VectorXd d = VectorXd::Zero(n);
  for (int m = 0; m < config_.substeps; ++m) rk4_step(model_, chi, v, u, d, dt_);
  VectorXd out(2 * n);
  out.head(n) = chi - chi_d_;
  out.tail(n) = v;
  return out;
}

OcpSolution RecedingHorizonController::plan_step(const VectorXd& xi_nominal) {
  OcpSolution sol = ocp_->solve(xi_nominal, warm_, mu_hint_);
  const int N = static_cast<int>(sol.controls.rows());
  MatrixXd W = sol.controls;
  if (N > 1) W.topRows(N - 1) = sol.controls.bottomRows(N - 1);
  const TerminalIngredients& term = ocp_->terminal();
  const VectorXd u_tail = term.u_eq + term.K * sol.predicted.back();
  W.row(N - 1) = ocp_->tightened().u_box.clamp(u_tail).transpose();
  warm_ = W;
  mu_hint_ = sol.mu_final;
  return sol;
}

}  // namespace tubenav

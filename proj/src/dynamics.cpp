#include "tubenav/dynamics.hpp"

#include <cmath>
#include <complex>

#include "tubenav/rng.hpp"

namespace tubenav {

namespace {

constexpr double kFdStep = 1e-6;

VectorXd coupled_rhs(const RobotModel& model, const VectorXd& chi, const VectorXd& v,
                     const VectorXd& u, const VectorXd& d) {
  VectorXd out(2 * model.n);
  out.head(model.n) = v;
  out.tail(model.n) = model.f(chi, v, u) + d;
  return out;
}

MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& g, const VectorXd& x0,
                     int out_dim) {
  MatrixXd J(out_dim, x0.size());
  for (int j = 0; j < x0.size(); ++j) {
    VectorXd hi = x0, lo = x0;
    hi[j] += kFdStep;
    lo[j] -= kFdStep;
    J.col(j) = (g(hi) - g(lo)) / (2.0 * kFdStep);
  }
  return J;
}

VectorXd sample_box(const Box& box, Rng& rng) {
  VectorXd p(box.dim());
  for (int i = 0; i < box.dim(); ++i) p[i] = rng.uniform(box.lower[i], box.upper[i]);
  return p;
}

}  // namespace

void rk4_step(const RobotModel& model, VectorXd& chi, VectorXd& v, const VectorXd& u,
              const VectorXd& d, double dt) {
  if (dt <= 0) throw std::invalid_argument("rk4_step: dt must be positive");
  const int n = model.n;
  VectorXd s(2 * n);
  s << chi, v;
  auto rhs = [&](const VectorXd& state) {
    return coupled_rhs(model, state.head(n), state.tail(n), u, d);
  };
  const VectorXd k1 = rhs(s);
  const VectorXd k2 = rhs(s + 0.5 * dt * k1);
  const VectorXd k3 = rhs(s + 0.5 * dt * k2);
  const VectorXd k4 = rhs(s + dt * k3);
  s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!s.allFinite()) throw std::runtime_error("rk4_step: non-finite state (model blow-up)");
  chi = s.head(n);
  v = s.tail(n);
}

Jacobians jacobians(const RobotModel& model, const VectorXd& chi, const VectorXd& v,
                    const VectorXd& u) {
  Jacobians J;
  J.dchi = model.dfdchi ? model.dfdchi(chi, v, u)
                        : fd_jacobian([&](const VectorXd& x) { return model.f(x, v, u); }, chi,
                                      model.n);
  J.dv = model.dfdv ? model.dfdv(chi, v, u)
                    : fd_jacobian([&](const VectorXd& x) { return model.f(chi, x, u); }, v,
                                  model.n);
  J.du = model.dfdu ? model.dfdu(chi, v, u)
                    : fd_jacobian([&](const VectorXd& x) { return model.f(chi, v, x); }, u,
                                  model.n);
  return J;
}

JLowerReport estimate_j_lower(const RobotModel& model, const Box& workspace, int samples,
                              std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("estimate_j_lower: samples must be >= 1");
  Rng rng(seed);
  double min_eig = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const VectorXd chi = sample_box(workspace, rng);
    const VectorXd v = sample_box(model.velocity_box, rng);
    const VectorXd u = sample_box(model.input_box, rng);
    const MatrixXd J = jacobians(model, chi, v, u).du;
    const MatrixXd sym = 0.5 * (J + J.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  JLowerReport report;
  report.estimate = min_eig;
  report.violated = min_eig <= 0.0;
  report.below_declared = min_eig < model.j_lower - 1e-9;
  return report;
}

LipschitzReport estimate_lipschitz(const RobotModel& model, const Box& workspace, int samples,
                                   std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("estimate_lipschitz: samples must be >= 1");
  Rng rng(seed);
  LipschitzReport report;
  for (int s = 0; s < samples; ++s) {
    const VectorXd chi = sample_box(workspace, rng);
    const VectorXd v = sample_box(model.velocity_box, rng);
    const VectorXd u = sample_box(model.input_box, rng);
    const Jacobians J = jacobians(model, chi, v, u);
    report.L1 = std::max(report.L1, J.dchi.operatorNorm());
    report.L2 = std::max(report.L2, J.dv.operatorNorm());
  }
  report.L = std::max(report.L1, report.L2);
  report.above_declared = report.L > model.lipschitz_L + 1e-9;
  return report;
}

void linearize(const RobotModel& model, const VectorXd& chi_ref, const VectorXd& v_ref,
               const VectorXd& u_ref, MatrixXd& A, MatrixXd& B) {
  const int n = model.n;
  const Jacobians J = jacobians(model, chi_ref, v_ref, u_ref);
  A = MatrixXd::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n) = MatrixXd::Identity(n, n);
  A.bottomLeftCorner(n, n) = J.dchi;
  A.bottomRightCorner(n, n) = J.dv;
  B = MatrixXd::Zero(2 * n, n);
  B.bottomRows(n) = J.du;
}

bool check_stabilizability(const RobotModel& model) {
  const int n = model.n;
  MatrixXd A, B;
  linearize(model, VectorXd::Zero(n), VectorXd::Zero(n), VectorXd::Zero(n), A, B);
  // PBH: for every eigenvalue λ of A with Re λ ≥ 0, rank [A − λI, B] = 2n.
  Eigen::EigenSolver<MatrixXd> es(A);
  const int dim = 2 * n;
  for (int i = 0; i < dim; ++i) {
    const std::complex<double> lambda = es.eigenvalues()[i];
    if (lambda.real() < -1e-9) continue;
    Eigen::MatrixXcd pencil(dim, dim + n);
    pencil.leftCols(dim) =
        A.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(dim, dim);
    pencil.rightCols(n) = B.cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(pencil);
    lu.setThreshold(1e-9);
    if (lu.rank() < dim) return false;
  }
  return true;
}

VectorXd DisturbanceSignal::at(double t, std::int64_t step_index, int n) const {
  VectorXd d = VectorXd::Zero(n);
  switch (kind) {
    case Kind::Zero:
      break;
    case Kind::Sinusoidal:
      // The planar pattern d̃(cos t, sin t); higher dimensions stay zero so
      // the Euclidean bound d̃ is preserved.
      if (n >= 1) d[0] = bound * std::cos(t);
      if (n >= 2) d[1] = bound * std::sin(t);
      break;
    case Kind::UniformRandom: {
      // One draw per integration sub-step: random direction, random
      // magnitude in [0, d̃].
      const std::uint64_t h1 = splitmix64(seed ^ static_cast<std::uint64_t>(step_index));
      const std::uint64_t h2 = splitmix64(h1 ^ 0xa5a5a5a5a5a5a5a5ULL);
      const double angle = 2.0 * M_PI * (static_cast<double>(h1 >> 11) * 0x1.0p-53);
      const double mag = bound * (static_cast<double>(h2 >> 11) * 0x1.0p-53);
      if (n >= 2) {
        d[0] = mag * std::cos(angle);
        d[1] = mag * std::sin(angle);
      } else if (n == 1) {
        d[0] = mag * std::cos(angle);
      }
      break;
    }
  }
  return d;
}

}  // namespace tubenav

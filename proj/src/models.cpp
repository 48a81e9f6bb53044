#include "tubenav/models.hpp"

#include <cmath>

namespace tubenav {

namespace {

RobotModel make_nonaffine2d() {
  RobotModel m;
  m.name = "nonaffine2d";
  m.n = 2;
  m.f = [](const VectorXd& chi, const VectorXd&, const VectorXd& u) {
    const double x = chi[0], y = chi[1];
    VectorXd a(2);
    a[0] = 0.25 * x * x + u[0];
    a[1] = (0.1 - 0.1 * std::exp(-x)) / (1.0 + std::exp(-x)) + 0.25 * y * y + u[1] +
           0.1 * u[1] * u[1] * u[1];
    return a;
  };
  m.dfdchi = [](const VectorXd& chi, const VectorXd&, const VectorXd&) {
    const double x = chi[0], y = chi[1];
    MatrixXd J = MatrixXd::Zero(2, 2);
    J(0, 0) = 0.5 * x;
    // d/dx of 0.1·tanh(x/2) (the sigmoid term rewritten): 0.05 / cosh²(x/2).
    const double c = std::cosh(0.5 * x);
    J(1, 0) = 0.05 / (c * c);
    J(1, 1) = 0.5 * y;
    return J;
  };
  m.dfdv = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(2, 2);
  };
  m.dfdu = [](const VectorXd&, const VectorXd&, const VectorXd& u) {
    MatrixXd J = MatrixXd::Identity(2, 2);
    J(1, 1) = 1.0 + 0.3 * u[1] * u[1];
    return J;
  };
  VectorXd v_half(2), u_half(2);
  v_half << 5.0, 5.0;
  u_half << 2.125, 2.125;
  m.velocity_box = Box::centered(v_half);
  m.input_box = Box::centered(u_half);
  m.lipschitz_L = 2.5;
  m.j_lower = 1.0;
  return m;
}

RobotModel make_double_integrator() {
  RobotModel m;
  m.name = "double_integrator";
  m.n = 2;
  m.f = [](const VectorXd&, const VectorXd&, const VectorXd& u) { return u; };
  m.dfdchi = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(2, 2);
  };
  m.dfdv = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(2, 2);
  };
  m.dfdu = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return MatrixXd::Identity(2, 2);
  };
  VectorXd v_half(2), u_half(2);
  v_half << 5.0, 5.0;
  u_half << 2.0, 2.0;
  m.velocity_box = Box::centered(v_half);
  m.input_box = Box::centered(u_half);
  m.lipschitz_L = 0.01;  // nominal positive constant; f has no state dependence
  m.j_lower = 1.0;
  return m;
}

RobotModel make_linear2d() {
  RobotModel m;
  m.name = "linear2d";
  m.n = 2;
  MatrixXd A1(2, 2), A2(2, 2);
  A1 << 0.2, 0.0, 0.1, -0.3;
  A2 << -0.1, 0.0, 0.0, -0.1;
  m.f = [A1, A2](const VectorXd& chi, const VectorXd& v, const VectorXd& u) {
    return VectorXd(A1 * chi + A2 * v + u);
  };
  m.dfdchi = [A1](const VectorXd&, const VectorXd&, const VectorXd&) { return A1; };
  m.dfdv = [A2](const VectorXd&, const VectorXd&, const VectorXd&) { return A2; };
  m.dfdu = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return MatrixXd::Identity(2, 2);
  };
  VectorXd v_half(2), u_half(2);
  v_half << 5.0, 5.0;
  u_half << 2.0, 2.0;
  m.velocity_box = Box::centered(v_half);
  m.input_box = Box::centered(u_half);
  m.lipschitz_L = 0.4;
  m.j_lower = 1.0;
  return m;
}

}  // namespace

RobotModel get_model(const std::string& name) {
  if (name == "nonaffine2d") return make_nonaffine2d();
  if (name == "double_integrator") return make_double_integrator();
  if (name == "linear2d") return make_linear2d();
  throw std::invalid_argument("unknown model: '" + name + "'");
}

}  // namespace tubenav

#pragma once

#include "tubenav/dynamics.hpp"

namespace tubenav {

// Registered models, selectable by name from scenario files:
//   "nonaffine2d"       — planar robot with quadratic drift, sigmoid coupling
//                         and a cubic input nonlinearity (the benchmark model
//                         used by the bundled scenario)
//   "double_integrator" — f(χ,v,u) = u
//   "linear2d"          — f(χ,v,u) = A₁χ + A₂v + u (mildly unstable A₁)
// Throws std::invalid_argument for unknown names.
RobotModel get_model(const std::string& name);

}  // namespace tubenav

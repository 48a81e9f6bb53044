#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tubenav {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Raised when constraint tightening empties a set; carries the offending
// set's name and the erosion radius so the caller can report which part of
// the design (tube radii vs. geometry) is responsible.
class EmptySetError : public std::runtime_error {
 public:
  EmptySetError(const std::string& set_name, double radius)
      : std::runtime_error("set '" + set_name + "' becomes empty when eroded by radius " +
                           std::to_string(radius)),
        set_name(set_name),
        radius(radius) {}
  std::string set_name;
  double radius;
};

struct Ball {
  VectorXd center;
  double radius = 0.0;

  Ball() = default;
  Ball(VectorXd c, double r) : center(std::move(c)), radius(r) {
    if (radius < 0) throw std::invalid_argument("Ball radius must be nonnegative");
  }
  bool contains(const VectorXd& p) const { return (p - center).norm() <= radius; }
};

struct Box {
  VectorXd lower;
  VectorXd upper;

  Box() = default;
  Box(VectorXd lo, VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("Box bounds must have equal dimension");
    for (int i = 0; i < lower.size(); ++i)
      if (lower[i] > upper[i]) throw std::invalid_argument("Box requires lower <= upper");
  }
  static Box centered(const VectorXd& half_width) { return Box(-half_width, half_width); }
  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const VectorXd& p) const {
    return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all();
  }
  VectorXd clamp(const VectorXd& p) const {
    return p.cwiseMax(lower).cwiseMin(upper);
  }
};

Ball translate_set(const Ball& b, const VectorXd& t);
Box translate_set(const Box& b, const VectorXd& t);

// Pontryagin difference Box ⊖ Ball(0, r). Throws EmptySetError (with the
// given set name) if any interval collapses below zero width.
Box erode_box_by_ball(const Box& b, double r, const std::string& set_name = "box");

// Pontryagin difference Ball ⊖ Ball(0, r) = concentric ball of radius-r.
Ball erode_ball_by_ball(const Ball& b, double r, const std::string& set_name = "ball");

// Radius of the smallest origin-centered ball containing the image of
// Ω₁×Ω₂ under [-kIₙ, -kIₙ]: the input-erosion radius k(r_e + r_v).
double feedback_image_radius(double k, double r_e, double r_v);

bool ball_in_box(const Ball& b, const Box& box);
bool balls_disjoint(const Ball& a, const Ball& b);

}  // namespace tubenav

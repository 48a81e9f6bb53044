#include "tubenav/geometry.hpp"

namespace tubenav {

Ball translate_set(const Ball& b, const VectorXd& t) {
  if (b.center.size() != t.size())
    throw std::invalid_argument("translate_set: dimension mismatch");
  return Ball(b.center + t, b.radius);
}

Box translate_set(const Box& b, const VectorXd& t) {
  if (b.lower.size() != t.size())
    throw std::invalid_argument("translate_set: dimension mismatch");
  return Box(b.lower + t, b.upper + t);
}

Box erode_box_by_ball(const Box& b, double r, const std::string& set_name) {
  if (r < 0) throw std::invalid_argument("erode_box_by_ball: radius must be nonnegative");
  VectorXd lo = b.lower.array() + r;
  VectorXd hi = b.upper.array() - r;
  for (int i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) throw EmptySetError(set_name, r);
  return Box(lo, hi);
}

Ball erode_ball_by_ball(const Ball& b, double r, const std::string& set_name) {
  if (r < 0) throw std::invalid_argument("erode_ball_by_ball: radius must be nonnegative");
  if (r > b.radius) throw EmptySetError(set_name, r);
  return Ball(b.center, b.radius - r);
}

double feedback_image_radius(double k, double r_e, double r_v) {
  if (k <= 0) throw std::invalid_argument("feedback_image_radius: k must be positive");
  if (r_e < 0 || r_v < 0)
    throw std::invalid_argument("feedback_image_radius: radii must be nonnegative");
  return k * (r_e + r_v);
}

bool ball_in_box(const Ball& b, const Box& box) {
  if (b.center.size() != box.dim())
    throw std::invalid_argument("ball_in_box: dimension mismatch");
  return (b.center.array() >= box.lower.array() + b.radius).all() &&
         (b.center.array() <= box.upper.array() - b.radius).all();
}

bool balls_disjoint(const Ball& a, const Ball& b) {
  if (a.center.size() != b.center.size())
    throw std::invalid_argument("balls_disjoint: dimension mismatch");
  return (a.center - b.center).norm() > a.radius + b.radius;
}

}  // namespace tubenav

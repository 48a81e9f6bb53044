#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tubenav/dynamics.hpp"
#include "tubenav/geometry.hpp"
#include "tubenav/rational.hpp"

namespace tubenav {

struct Roi {
  int id = 0;
  VectorXd center;
  double radius = 0.0;
  std::set<std::string> labels;

  Ball ball() const { return Ball(center, radius); }
  bool has_label(const std::string& l) const { return labels.count(l) > 0; }
};

// How the input constraint is tightened for the FHOCP.
//   Guaranteed: Ū = 𝒰 ⊖ Ball(0, k(r_e+r_v)) — the constraint-tightening
//     construction; fails (empty Ū) whenever the designed gain k is large
//     relative to the input box.
//   Monitor: Ū = 𝒰 ⊖ Ball(0, u_headroom) with the ancillary feedback κ
//     saturated so that the applied input stays inside 𝒰; tube containment
//     is then checked empirically on every run instead of being guaranteed
//     a priori.
enum class TubeMode { Guaranteed, Monitor };

struct DisturbanceSpec {
  std::string kind = "zero";  // zero | sinusoidal | uniform-random
  std::uint64_t seed = 0;

  DisturbanceSignal signal(double d_tilde) const;
};

struct Scenario {
  Box workspace;
  double robot_radius = 0.0;  // 𝔯
  std::vector<Roi> rois;
  std::string model_name;
  DisturbanceSpec disturbance;
  double d_tilde = 0.0;
  std::optional<double> declared_L;
  std::optional<double> declared_J_lower;
  VectorXd chi0;
  VectorXd v0;
  std::string formula;
  std::set<std::string> unsafe_labels;  // RoI carrying any of these are forbidden in transit

  // FHOCP timing/weights. h and T are exact rationals (T/h must be integral).
  Rat h{1, 10};
  Rat T{12, 10};
  VectorXd Q_diag;  // 2n entries
  VectorXd R_diag;  // n entries

  double rho_margin = 1.2;
  double k_margin = 1.1;
  TubeMode tube_mode = TubeMode::Guaranteed;
  double u_headroom = 0.0;           // monitor mode: erosion radius for Ū
  double max_leg_duration = 60.0;    // navigate timeout (simulated seconds)
  std::uint64_t seed = 0;

  const Roi* roi_by_id(int id) const;
  bool roi_is_unsafe(const Roi& r) const;
  // RoI that may act as navigation sources/targets (not unsafe-labeled).
  std::vector<int> safe_roi_ids() const;
  // The RoI whose interior strictly contains B(χ(0), 𝔯), if any.
  const Roi* initial_roi() const;
};

// Loads and validates a YAML scenario file. Throws std::runtime_error with
// the offending field path on schema violations.
Scenario load_scenario(const std::string& path);

}  // namespace tubenav

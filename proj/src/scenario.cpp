#include "tubenav/scenario.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "tubenav/mitl.hpp"
#include "tubenav/models.hpp"

namespace tubenav {

const Roi* Scenario::roi_by_id(int id) const {
  for (const Roi& r : rois)
    if (r.id == id) return &r;
  return nullptr;
}

bool Scenario::roi_is_unsafe(const Roi& r) const {
  return std::any_of(r.labels.begin(), r.labels.end(),
                     [&](const std::string& l) { return unsafe_labels.count(l) > 0; });
}

std::vector<int> Scenario::safe_roi_ids() const {
  std::vector<int> ids;
  for (const Roi& r : rois)
    if (!roi_is_unsafe(r)) ids.push_back(r.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

const Roi* Scenario::initial_roi() const {
  for (const Roi& r : rois)
    if ((chi0 - r.center).norm() <= r.radius - robot_radius + 1e-9) return &r;
  return nullptr;
}

DisturbanceSignal DisturbanceSpec::signal(double d_tilde) const {
  if (kind == "zero") return DisturbanceSignal::zero();
  if (kind == "sinusoidal") return DisturbanceSignal::sinusoidal(d_tilde);
  if (kind == "uniform-random") return DisturbanceSignal::uniform_random(d_tilde, seed);
  throw std::invalid_argument("unknown disturbance kind: " + kind);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("scenario." + path + ": " + what);
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& path) {
  const YAML::Node child = node[key];
  if (!child) fail(path.empty() ? key : path + "." + key, "missing");
  return child;
}

double require_double(const YAML::Node& node, const std::string& key,
                      const std::string& path) {
  const YAML::Node child = require(node, key, path);
  try {
    return child.as<double>();
  } catch (const YAML::Exception&) {
    fail(path.empty() ? key : path + "." + key, "not a number");
  }
}

Rat require_rat(const YAML::Node& node, const std::string& key, const std::string& path) {
  const YAML::Node child = require(node, key, path);
  try {
    return rat_from_string(child.as<std::string>());
  } catch (const std::exception& e) {
    fail(path.empty() ? key : path + "." + key, e.what());
  }
}

VectorXd read_vector(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) fail(path, "expected a list of numbers");
  VectorXd out(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    try {
      out(static_cast<Eigen::Index>(i)) = node[i].as<double>();
    } catch (const YAML::Exception&) {
      fail(path + "[" + std::to_string(i) + "]", "not a number");
    }
  }
  return out;
}

// A □_[0,∞) conjunct over a negated atom marks that atom's regions unsafe.
std::set<std::string> unsafe_labels_from_formula(const std::string& formula) {
  std::set<std::string> unsafe;
  try {
    const FormulaPtr ast = parse_mitl(formula);
    for (const Conjunct& c : validate_fragment(*ast))
      if (c.kind == ConjunctKind::Always && c.lit.negated) unsafe.insert(c.lit.atom);
  } catch (const FragmentError&) {
    // Outside the executable fragment: nothing to derive; synthesis will
    // reject the formula with a precise message if it is ever used.
  }
  return unsafe;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw std::runtime_error("scenario file " + path + ": " + e.what());
  }
  Scenario sc;

  const YAML::Node ws = require(root, "workspace", "");
  const VectorXd lower = read_vector(require(ws, "lower", "workspace"), "workspace.lower");
  const VectorXd upper = read_vector(require(ws, "upper", "workspace"), "workspace.upper");
  if (lower.size() != upper.size()) fail("workspace", "lower/upper dimension mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower(i) < upper(i))) fail("workspace", "lower must be strictly below upper");
  sc.workspace = Box(lower, upper);

  sc.robot_radius = require_double(root, "robot_radius", "");
  if (sc.robot_radius <= 0) fail("robot_radius", "must be positive");

  sc.model_name = require(root, "model", "").as<std::string>();
  const RobotModel model = get_model(sc.model_name);  // throws on unknown names
  if (model.n != lower.size()) fail("workspace", "dimension does not match the model");

  sc.d_tilde = require_double(root, "d_tilde", "");
  if (sc.d_tilde < 0) fail("d_tilde", "must be nonnegative");
  if (root["declared_L"]) sc.declared_L = root["declared_L"].as<double>();
  if (root["declared_J_lower"]) sc.declared_J_lower = root["declared_J_lower"].as<double>();

  const YAML::Node init = require(root, "initial", "");
  sc.chi0 = read_vector(require(init, "chi", "initial"), "initial.chi");
  sc.v0 = read_vector(require(init, "v", "initial"), "initial.v");
  if (sc.chi0.size() != model.n || sc.v0.size() != model.n)
    fail("initial", "chi/v dimension does not match the model");
  if (!sc.workspace.contains(sc.chi0)) fail("initial.chi", "not inside the workspace");

  sc.formula = require(root, "formula", "").as<std::string>();
  try {
    parse_mitl(sc.formula);
  } catch (const ParseError& e) {
    fail("formula", e.what());
  }

  const YAML::Node rois = require(root, "rois", "");
  if (!rois.IsSequence() || rois.size() == 0) fail("rois", "expected a nonempty list");
  std::set<int> seen_ids;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const std::string rp = "rois[" + std::to_string(i) + "]";
    const YAML::Node rn = rois[i];
    Roi roi;
    roi.id = static_cast<int>(require_double(rn, "id", rp));
    if (!seen_ids.insert(roi.id).second) fail(rp + ".id", "duplicate RoI id");
    roi.center = read_vector(require(rn, "center", rp), rp + ".center");
    if (roi.center.size() != model.n) fail(rp + ".center", "dimension mismatch");
    roi.radius = require_double(rn, "radius", rp);
    if (roi.radius <= sc.robot_radius)
      fail(rp + ".radius", "must exceed robot_radius (the RoI must fit the robot ball)");
    if (const YAML::Node labels = rn["labels"])
      for (const YAML::Node& l : labels) roi.labels.insert(l.as<std::string>());
    sc.rois.push_back(std::move(roi));
  }

  if (const YAML::Node dist = root["disturbance"]) {
    sc.disturbance.kind = require(dist, "kind", "disturbance").as<std::string>();
    if (dist["seed"]) sc.disturbance.seed = dist["seed"].as<std::uint64_t>();
    sc.disturbance.signal(sc.d_tilde);  // validates the kind
  }

  if (const YAML::Node ul = root["unsafe_labels"]) {
    for (const YAML::Node& l : ul) sc.unsafe_labels.insert(l.as<std::string>());
  } else {
    sc.unsafe_labels = unsafe_labels_from_formula(sc.formula);
  }

  const YAML::Node fhocp = require(root, "fhocp", "");
  sc.h = require_rat(fhocp, "h", "fhocp");
  sc.T = require_rat(fhocp, "T", "fhocp");
  if (sc.h <= Rat(0)) fail("fhocp.h", "must be positive");
  if (sc.T < sc.h) fail("fhocp.T", "must be at least h");
  if ((sc.T / sc.h).denominator() != 1) fail("fhocp.T", "must be an integer multiple of h");
  sc.Q_diag = read_vector(require(fhocp, "Q", "fhocp"), "fhocp.Q");
  sc.R_diag = read_vector(require(fhocp, "R", "fhocp"), "fhocp.R");
  if (sc.Q_diag.size() != 2 * model.n) fail("fhocp.Q", "expected 2n diagonal entries");
  if (sc.R_diag.size() != model.n) fail("fhocp.R", "expected n diagonal entries");
  for (Eigen::Index i = 0; i < sc.Q_diag.size(); ++i)
    if (sc.Q_diag(i) <= 0) fail("fhocp.Q", "diagonal entries must be positive");
  for (Eigen::Index i = 0; i < sc.R_diag.size(); ++i)
    if (sc.R_diag(i) <= 0) fail("fhocp.R", "diagonal entries must be positive");

  const YAML::Node gains = require(root, "gains", "");
  sc.rho_margin = require_double(gains, "rho_margin", "gains");
  sc.k_margin = require_double(gains, "k_margin", "gains");
  if (sc.rho_margin <= 1.0 || sc.k_margin <= 1.0) fail("gains", "margins must be > 1");

  if (const YAML::Node tube = root["tube"]) {
    const std::string mode = require(tube, "mode", "tube").as<std::string>();
    if (mode == "guaranteed") {
      sc.tube_mode = TubeMode::Guaranteed;
    } else if (mode == "monitor") {
      sc.tube_mode = TubeMode::Monitor;
      sc.u_headroom = require_double(tube, "u_headroom", "tube");
      if (sc.u_headroom <= 0) fail("tube.u_headroom", "must be positive in monitor mode");
    } else {
      fail("tube.mode", "expected 'guaranteed' or 'monitor'");
    }
  }

  if (root["max_leg_duration"]) {
    sc.max_leg_duration = root["max_leg_duration"].as<double>();
    if (sc.max_leg_duration <= 0) fail("max_leg_duration", "must be positive");
  }
  if (root["seed"]) sc.seed = root["seed"].as<std::uint64_t>();

  return sc;
}

}  // namespace tubenav

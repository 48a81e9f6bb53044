#include "tubenav/abstraction.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tubenav {

std::optional<Rat> Wts::duration(int source, int dest) const {
  for (const Transition& t : transitions)
    if (t.source == source && t.dest == dest) return t.duration;
  return std::nullopt;
}

std::vector<const Wts::Transition*> Wts::out_of(int source) const {
  std::vector<const Transition*> out;
  for (const Transition& t : transitions)
    if (t.source == source) out.push_back(&t);
  return out;
}

const std::set<std::string>& Wts::labels_of(int state) const {
  const auto it = labels.find(state);
  if (it == labels.end()) throw std::invalid_argument("WTS: unknown state id");
  return it->second;
}

namespace {

struct PairOutcome {
  bool feasible = false;
  Rat duration{0};
  std::string reason;
};

}  // namespace

WtsBuildResult build_wts(const Scenario& scenario, const RobotModel& model,
                         const TubeGains& gains, const FhocpConfig& config,
                         bool include_unsafe_targets, int threads) {
  WtsBuildResult result;
  Wts& wts = result.wts;

  for (const Roi& roi : scenario.rois) {
    wts.states.push_back(roi.id);
    wts.labels[roi.id] = roi.labels;
    for (const std::string& a : roi.labels) wts.alphabet.insert(a);
  }
  std::sort(wts.states.begin(), wts.states.end());

  const Roi* init = scenario.initial_roi();
  if (init == nullptr)
    throw std::runtime_error(
        "abstraction: no RoI strictly contains the robot ball at chi(0); "
        "the initial state is undefined");
  wts.initial = init->id;

  std::vector<int> candidates =
      include_unsafe_targets ? wts.states : scenario.safe_roi_ids();

  // Assumption 4 spacing for a candidate pair: transit legs are only
  // attempted when the tube fits between the two RoI.
  const double required =
      2.0 * scenario.robot_radius + 2.0 * scenario.d_tilde / std::sqrt(gains.min_alpha());
  const auto spacing_ok = [&](const Roi& a, const Roi& b) {
    return (a.center - b.center).norm() - (a.radius + b.radius) > required;
  };

  std::vector<std::pair<int, int>> pairs;
  for (int s : candidates)
    for (int d : candidates) {
      if (s == d) continue;
      const Roi& rs = *scenario.roi_by_id(s);
      const Roi& rd = *scenario.roi_by_id(d);
      if (!spacing_ok(rs, rd)) {
        std::ostringstream msg;
        msg << "Assumption 4 spacing violated: clearance "
            << (rs.center - rd.center).norm() - (rs.radius + rd.radius)
            << " <= required " << required;
        result.failures.push_back({s, d, msg.str()});
        continue;
      }
      pairs.emplace_back(s, d);
    }

  // Terminal ingredients depend only on the destination; design them once,
  // sequentially, so the per-destination RNG streams are deterministic.
  const Box u_box = erode_box_by_ball(
      model.input_box, input_tightening_radius(scenario, gains), "U (input)");
  std::map<int, TerminalIngredients> terminal_by_dest;
  std::map<int, std::string> terminal_errors;
  std::set<int> dests;
  for (const auto& [s, d] : pairs) dests.insert(d);
  for (int d : dests) {
    try {
      terminal_by_dest.emplace(
          d, design_terminal_for_leg(scenario, model, gains, *scenario.roi_by_id(d), u_box));
    } catch (const std::exception& e) {
      terminal_errors[d] = e.what();
    }
  }

  std::vector<PairOutcome> outcomes(pairs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
      const auto [s, d] = pairs[i];
      PairOutcome& slot = outcomes[i];
      const auto terr = terminal_errors.find(d);
      if (terr != terminal_errors.end()) {
        slot.reason = "terminal design failed: " + terr->second;
        continue;
      }
      const Roi& rs = *scenario.roi_by_id(s);
      const Roi& rd = *scenario.roi_by_id(d);
      try {
        NavigateOptions opts;
        opts.verification_tail = 0.0;
        opts.terminal = terminal_by_dest.at(d);
        TransitionResult leg = navigate(scenario, model, gains, config, rs, rd, rs.center,
                                        VectorXd::Zero(model.n), opts);
        if (leg.feasible) {
          slot.feasible = true;
          slot.duration = leg.duration;
        } else {
          std::ostringstream msg;
          for (std::size_t v = 0; v < leg.violations.size(); ++v)
            msg << (v ? "; " : "") << leg.violations[v];
          slot.reason = msg.str();
        }
      } catch (const std::exception& e) {
        slot.reason = e.what();
      }
    }
  };

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(pairs.size())));
  if (nthreads <= 1 || pairs.empty()) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, d] = pairs[i];
    if (outcomes[i].feasible)
      wts.transitions.push_back({s, d, outcomes[i].duration});
    else
      result.failures.push_back({s, d, outcomes[i].reason});
  }
  std::sort(wts.transitions.begin(), wts.transitions.end(),
            [](const Wts::Transition& a, const Wts::Transition& b) {
              return a.source != b.source ? a.source < b.source : a.dest < b.dest;
            });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const FailedLeg& a, const FailedLeg& b) {
              return a.source != b.source ? a.source < b.source : a.dest < b.dest;
            });

  if (!pairs.empty() && wts.out_of(wts.initial).empty())
    throw std::runtime_error(
        "abstraction: empty WTS, no feasible transitions from the initial RoI");
  return result;
}

std::vector<TimedRunEntry> timed_run_of(const Wts& wts, const std::vector<int>& plan) {
  if (plan.empty()) throw std::invalid_argument("timed_run_of: empty region sequence");
  if (plan.front() != wts.initial)
    throw std::invalid_argument("timed_run_of: plan does not start at the initial state");
  std::vector<TimedRunEntry> run;
  Rat stamp{0};
  run.push_back({plan.front(), stamp});
  for (std::size_t i = 1; i < plan.size(); ++i) {
    const auto dur = wts.duration(plan[i - 1], plan[i]);
    if (!dur) {
      std::ostringstream msg;
      msg << "timed_run_of: no transition " << plan[i - 1] << " -> " << plan[i];
      throw std::invalid_argument(msg.str());
    }
    stamp = stamp + *dur;
    run.push_back({plan[i], stamp});
  }
  return run;
}

std::string to_dot(const Wts& wts) {
  std::ostringstream out;
  out << "digraph wts {\n  rankdir=LR;\n";
  for (int s : wts.states) {
    out << "  n" << s << " [label=\"R" << s;
    const auto it = wts.labels.find(s);
    if (it != wts.labels.end() && !it->second.empty()) {
      out << "\\n{";
      bool first = true;
      for (const std::string& a : it->second) {
        out << (first ? "" : ",") << a;
        first = false;
      }
      out << "}";
    }
    out << "\"";
    if (s == wts.initial) out << ", shape=doublecircle";
    out << "];\n";
  }
  for (const Wts::Transition& t : wts.transitions)
    out << "  n" << t.source << " -> n" << t.dest << " [label=\""
        << to_double(t.duration) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace tubenav

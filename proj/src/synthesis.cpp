#include "tubenav/synthesis.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace tubenav {

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

std::string canonical_formula(const Tba& tba) {
  std::ostringstream out;
  for (std::size_t i = 0; i < tba.conjuncts.size(); ++i)
    out << (i ? " & " : "") << tba.conjuncts[i].str();
  return out.str();
}

struct SearchNode {
  Rat stamp{0};
  int legs = 0;
  std::vector<int> route;  // visited regions, route.front() == initial
  std::vector<int> locs;   // TBA location tuple after consuming route.back()
};

// Min-heap order: smallest (stamp, legs, lexicographic route) first.
struct NodeAfter {
  bool operator()(const SearchNode& a, const SearchNode& b) const {
    if (a.stamp != b.stamp) return a.stamp > b.stamp;
    if (a.legs != b.legs) return a.legs > b.legs;
    return a.route > b.route;
  }
};

TimedPlan plan_from(const std::vector<int>& route, const Wts& wts, const Tba& tba) {
  TimedPlan plan;
  plan.run = timed_run_of(wts, route);
  for (std::size_t i = 0; i + 1 < plan.run.size(); ++i)
    plan.goals.push_back({plan.run[i].region, plan.run[i + 1].region, plan.run[i].stamp,
                          plan.run[i + 1].stamp});
  plan.formula = canonical_formula(tba);
  plan.formula_digest = fnv1a_digest(plan.formula);
  return plan;
}

}  // namespace

std::optional<TimedPlan> product_search(const Wts& wts, const Tba& tba,
                                        const Rat& horizon_bound, std::string* debug_dot) {
  Rat max_leg{0};
  for (const Wts::Transition& t : wts.transitions) max_leg = std::max(max_leg, t.duration);
  const Rat stamp_cap = horizon_bound + max_leg;

  // Goal test under the stay-forever suffix: consume the region's letter once
  // more at a stamp beyond every interval bound.
  const auto is_goal = [&](int region, const std::vector<int>& locs) {
    return tba.is_accepting(tba.step(locs, wts.labels_of(region), tba.suffix_stamp()));
  };

  std::ostringstream dot;
  if (debug_dot) dot << "digraph product {\n  rankdir=LR;\n";
  const auto dot_id = [&](int region, const std::vector<int>& locs) {
    std::ostringstream id;
    id << "s" << region << "_" << tba.encode(locs);
    return id.str();
  };

  std::priority_queue<SearchNode, std::vector<SearchNode>, NodeAfter> frontier;
  // The product state is (region, TBA locations, clock). The clock is the
  // absolute stamp and is never reset, so guards with lower bounds make a
  // later arrival at the same (region, locations) genuinely different from an
  // earlier one; the settled key must therefore include the exact stamp.
  // Termination: durations are positive and stamps are capped.
  std::set<std::tuple<int, std::size_t, Rat>> settled;

  const std::vector<int> locs0 =
      tba.step(tba.initial_locs(), wts.labels_of(wts.initial), Rat(0));
  if (!tba.is_rejecting(locs0)) frontier.push({Rat(0), 0, {wts.initial}, locs0});

  std::optional<TimedPlan> result;
  while (!frontier.empty()) {
    SearchNode node = frontier.top();
    frontier.pop();
    const int region = node.route.back();
    const auto key = std::make_tuple(region, tba.encode(node.locs), node.stamp);
    if (settled.count(key)) continue;
    settled.insert(key);
    if (debug_dot)
      dot << "  " << dot_id(region, node.locs) << " [label=\"R" << region << " @ "
          << to_double(node.stamp) << "\"];\n";

    if (is_goal(region, node.locs)) {
      result = plan_from(node.route, wts, tba);
      break;
    }
    for (const Wts::Transition* t : wts.out_of(region)) {
      const Rat stamp = node.stamp + t->duration;
      if (stamp > stamp_cap) continue;
      const std::vector<int> locs = tba.step(node.locs, wts.labels_of(t->dest), stamp);
      if (tba.is_rejecting(locs)) continue;
      if (settled.count({t->dest, tba.encode(locs), stamp})) continue;
      if (debug_dot)
        dot << "  " << dot_id(region, node.locs) << " -> " << dot_id(t->dest, locs)
            << " [label=\"" << to_double(t->duration) << "\"];\n";
      SearchNode next{stamp, node.legs + 1, node.route, locs};
      next.route.push_back(t->dest);
      frontier.push(std::move(next));
    }
  }
  if (debug_dot) {
    dot << "}\n";
    *debug_dot = dot.str();
  }
  return result;
}

bool verify_plan(const TimedPlan& plan, const Wts& wts, const Tba& tba) {
  std::vector<int> route;
  for (const TimedRunEntry& e : plan.run) route.push_back(e.region);
  const std::vector<TimedRunEntry> recomputed = timed_run_of(wts, route);
  for (std::size_t i = 0; i < recomputed.size(); ++i)
    if (recomputed[i].stamp != plan.run[i].stamp)
      throw std::logic_error("verify_plan: plan stamps inconsistent with the WTS durations");

  TimedWord word;
  for (const TimedRunEntry& e : recomputed) word.push_back({e.stamp, wts.labels_of(e.region)});
  return accepts(tba, word);
}

ExecutionReport execute_plan(const TimedPlan& plan, const Scenario& scenario,
                             const RobotModel& model, const TubeGains& gains,
                             const FhocpConfig& config,
                             const DisturbanceSignal& disturbance) {
  ExecutionReport report;
  if (plan.run.empty()) throw std::invalid_argument("execute_plan: empty plan");

  const FormulaPtr formula = parse_mitl(scenario.formula);
  const Tba tba = build_tba(validate_fragment(*formula));

  const auto labels_at = [&](int id) {
    const Roi* roi = scenario.roi_by_id(id);
    if (roi == nullptr) throw std::invalid_argument("execute_plan: plan visits an unknown RoI");
    return roi->labels;
  };
  for (const TimedRunEntry& e : plan.run)
    report.planned_word.push_back({e.stamp, labels_at(e.region)});

  const Box u_box = erode_box_by_ball(
      model.input_box, input_tightening_radius(scenario, gains), "U (input)");
  std::map<int, TerminalIngredients> terminal_by_dest;

  VectorXd chi = scenario.chi0;
  VectorXd v = scenario.v0;
  Rat stamp{0};
  double t0 = 0.0;
  std::int64_t step0 = 0;
  report.realized_word.push_back({stamp, labels_at(plan.run.front().region)});

  for (std::size_t i = 0; i + 1 < plan.run.size(); ++i) {
    const Roi& source = *scenario.roi_by_id(plan.run[i].region);
    const Roi& dest = *scenario.roi_by_id(plan.run[i + 1].region);
    if (!terminal_by_dest.count(dest.id)) {
      try {
        terminal_by_dest.emplace(
            dest.id, design_terminal_for_leg(scenario, model, gains, dest, u_box));
      } catch (const std::exception& e) {
        report.aborted = true;
        report.abort_reason = "terminal design failed for R" + std::to_string(dest.id) +
                              ": " + e.what();
        break;
      }
    }
    NavigateOptions opts;
    opts.disturbance = disturbance;
    opts.verification_tail = 0.0;
    opts.t0 = t0;
    opts.disturbance_step0 = step0;
    opts.terminal = terminal_by_dest.at(dest.id);
    TransitionResult leg = navigate(scenario, model, gains, config, source, dest, chi, v, opts);
    report.legs.push_back(leg);
    if (!leg.feasible) {
      report.aborted = true;
      std::ostringstream msg;
      msg << "leg R" << source.id << " -> R" << dest.id << " failed: ";
      for (std::size_t k = 0; k < leg.violations.size(); ++k)
        msg << (k ? "; " : "") << leg.violations[k];
      report.abort_reason = msg.str();
      break;
    }
    chi = leg.chi_end;
    v = leg.v_end;
    stamp = stamp + leg.duration;
    t0 += to_double(leg.duration);
    step0 += static_cast<std::int64_t>(leg.steps) * config.substeps;
    report.realized_word.push_back({stamp, labels_at(dest.id)});
  }

  report.accepted = !report.aborted && accepts(tba, report.realized_word);
  return report;
}

}  // namespace tubenav

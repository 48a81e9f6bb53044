#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "tubenav/abstraction.hpp"
#include "tubenav/json_io.hpp"
#include "tubenav/models.hpp"
#include "tubenav/navigator.hpp"
#include "tubenav/synthesis.hpp"

namespace fs = std::filesystem;
using namespace tubenav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNoPlan = 2;

struct Pipeline {
  Scenario scenario;
  RobotModel model;
  TubeGains gains;
  FhocpConfig config;
};

Pipeline load_pipeline(const std::string& scenario_path) {
  Pipeline p;
  p.scenario = load_scenario(scenario_path);
  p.model = get_model(p.scenario.model_name);
  p.gains = design_gains_for(p.scenario, p.model);
  p.config = fhocp_config_from(p.scenario, p.model);
  return p;
}

std::string box_str(const Box& b) {
  std::ostringstream out;
  out << "[";
  for (Eigen::Index i = 0; i < b.lower.size(); ++i)
    out << (i ? " x [" : "") << b.lower(i) << ", " << b.upper(i) << "]";
  return out.str();
}

TimedWord word_from_plan(const TimedPlan& plan, const Scenario& sc) {
  TimedWord word;
  for (const TimedRunEntry& e : plan.run) {
    const Roi* roi = sc.roi_by_id(e.region);
    if (roi == nullptr)
      throw std::runtime_error("plan visits RoI " + std::to_string(e.region) +
                               " which the scenario does not define");
    word.push_back({e.stamp, roi->labels});
  }
  return word;
}

int cmd_validate(const std::string& scenario_path) {
  const Scenario sc = load_scenario(scenario_path);
  const RobotModel model = get_model(sc.model_name);
  bool ok = true;

  std::cout << "scenario: " << scenario_path << "\n";
  std::cout << "  workspace " << box_str(sc.workspace) << ", robot radius " << sc.robot_radius
            << ", " << sc.rois.size() << " RoI\n";
  std::cout << "assumption 1 (bounded disturbance): d_tilde = " << sc.d_tilde << " [ok]\n";

  const bool stab = check_stabilizability(model);
  std::cout << "assumption 2 (stabilizable linearization): " << (stab ? "[ok]" : "[FAIL]")
            << "\n";
  ok = ok && stab;

  const LipschitzReport lip = estimate_lipschitz(model, sc.workspace, 4000);
  const double L = sc.declared_L.value_or(lip.L);
  std::cout << "lipschitz: sampled L1 = " << lip.L1 << ", L2 = " << lip.L2 << ", L = " << lip.L;
  if (sc.declared_L) {
    std::cout << " (declared " << *sc.declared_L << ")";
    if (lip.L > *sc.declared_L) std::cout << " [WARN: samples exceed declared L]";
  }
  std::cout << "\n";

  const JLowerReport jl = estimate_j_lower(model, sc.workspace, 4000);
  const double J = sc.declared_J_lower.value_or(jl.estimate);
  std::cout << "assumption 3 (input-Jacobian lower bound): sampled J_lower = " << jl.estimate;
  if (sc.declared_J_lower) {
    std::cout << " (declared " << *sc.declared_J_lower << ")";
    if (jl.below_declared) std::cout << " [WARN: samples fall below declared J_lower]";
  }
  std::cout << (jl.violated ? " [FAIL]" : " [ok]") << "\n";
  ok = ok && !jl.violated;

  const TubeGains gains = design_gains(L, J, sc.d_tilde, sc.rho_margin, sc.k_margin);
  std::cout << "gains: rho = " << gains.rho << ", k = " << gains.k
            << ", alpha1 = " << gains.alpha1 << ", alpha2 = " << gains.alpha2
            << ", r_e = " << gains.r_e << ", r_v = " << gains.r_v << "\n";

  const Assumption4Report a4 = check_assumption4(sc, gains);
  std::cout << "assumption 4 (RoI spacing): required clearance " << a4.required << ", "
            << a4.failures.size() << " failing pair(s)" << (a4.ok() ? " [ok]" : " [FAIL]")
            << "\n";
  for (const auto& pr : a4.failures)
    std::cout << "  R" << pr.a << " / R" << pr.b << ": clearance deficit " << -pr.gap << "\n";
  ok = ok && a4.ok();

  const Roi* init = sc.initial_roi();
  if (init == nullptr) {
    std::cout << "initial state: chi(0) robot ball inside no RoI [FAIL]\n";
    ok = false;
  } else {
    std::cout << "initial state: inside R" << init->id << " [ok]\n";
  }

  std::cout << (ok ? "VALID" : "INVALID") << "\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_design(const std::string& scenario_path) {
  const Pipeline p = load_pipeline(scenario_path);
  const Scenario& sc = p.scenario;

  std::cout << "gains: rho = " << p.gains.rho << ", k = " << p.gains.k
            << ", alpha1 = " << p.gains.alpha1 << ", alpha2 = " << p.gains.alpha2 << "\n";
  std::cout << "tube radii: r_e = " << p.gains.r_e << ", r_v = " << p.gains.r_v << "\n";

  const Box u_box = erode_box_by_ball(p.model.input_box,
                                      input_tightening_radius(sc, p.gains), "U (input)");
  const Box v_box = erode_box_by_ball(p.model.velocity_box, p.gains.r_v, "V (velocity)");
  const Box e_box = erode_box_by_ball(
      erode_box_by_ball(sc.workspace, sc.robot_radius, "workspace (robot radius)"),
      p.gains.r_e, "E (position error box)");
  std::cout << "tightened U: " << box_str(u_box)
            << (sc.tube_mode == TubeMode::Monitor ? "  (monitor mode, headroom erosion)"
                                                  : "  (guaranteed mode)")
            << "\n";
  std::cout << "tightened V: " << box_str(v_box) << "\n";
  std::cout << "tightened workspace (position part): " << box_str(e_box) << "\n";
  std::cout << "forbidden-RoI inflation radius: +" << sc.robot_radius + p.gains.r_e << "\n";

  std::cout << "terminal ingredients per destination (safe RoI):\n";
  for (int id : sc.safe_roi_ids()) {
    const Roi& dest = *sc.roi_by_id(id);
    try {
      const TerminalIngredients term =
          design_terminal_for_leg(sc, p.model, p.gains, dest, u_box);
      std::cout << "  R" << id << ": epsilon = " << term.epsilon
                << ", lambda_min(P) = " << term.lambda_min_P
                << ", ball radius = " << term.euclidean_radius() << "\n";
    } catch (const std::exception& e) {
      std::cout << "  R" << id << ": terminal design failed: " << e.what() << "\n";
    }
  }
  return kExitOk;
}

int cmd_abstract(const std::string& scenario_path, const std::string& pairs_mode,
                 const std::string& out_path, const std::string& dot_path, int threads) {
  const Pipeline p = load_pipeline(scenario_path);
  const bool all_pairs = pairs_mode == "all";
  const WtsBuildResult result =
      build_wts(p.scenario, p.model, p.gains, p.config, all_pairs, threads);

  write_json_file(out_path, wts_to_json(result));
  if (!dot_path.empty()) write_text_file(dot_path, to_dot(result.wts));

  std::cout << "WTS: " << result.wts.states.size() << " states, "
            << result.wts.transitions.size() << " transitions, " << result.failures.size()
            << " failed pair(s); initial R" << result.wts.initial << "\n";
  for (const FailedLeg& f : result.failures)
    std::cout << "  R" << f.source << " -> R" << f.dest << ": " << f.reason << "\n";
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_synthesize(const std::string& scenario_path, const std::string& wts_path,
                   const std::string& out_path, const std::string& dot_path) {
  const Scenario sc = load_scenario(scenario_path);
  const Wts wts = wts_from_json(read_json_file(wts_path));

  const FormulaPtr formula = parse_mitl(sc.formula, wts.alphabet);
  const Tba tba = build_tba(validate_fragment(*formula));

  std::string product_dot;
  const std::optional<TimedPlan> plan =
      product_search(wts, tba, tba.horizon_bound, dot_path.empty() ? nullptr : &product_dot);
  if (!dot_path.empty()) write_text_file(dot_path, product_dot);

  if (!plan) {
    std::cout << "NO PLAN\n";
    return kExitNoPlan;
  }
  if (!verify_plan(*plan, wts, tba))  // by construction; checked, not assumed
    throw std::runtime_error("synthesized plan failed verification");

  write_json_file(out_path, plan_to_json(*plan));
  std::cout << "plan:";
  for (const TimedRunEntry& e : plan->run)
    std::cout << " R" << e.region << "@" << rat_to_string(e.stamp);
  std::cout << "\nwrote " << out_path << "\n";
  return kExitOk;
}

int cmd_run(const std::string& scenario_path, const std::string& plan_path,
            std::optional<std::uint64_t> seed_override, const std::string& disturbance_mode,
            const std::string& outdir) {
  Pipeline p = load_pipeline(scenario_path);
  Scenario& sc = p.scenario;
  if (seed_override) {
    sc.seed = *seed_override;
    sc.disturbance.seed = *seed_override;
  }
  const TimedPlan plan = plan_from_json(read_json_file(plan_path));

  DisturbanceSignal disturbance;
  if (disturbance_mode == "zero")
    disturbance = DisturbanceSignal::zero();
  else if (disturbance_mode == "paper")
    disturbance = DisturbanceSignal::sinusoidal(sc.d_tilde);
  else if (disturbance_mode == "random")
    disturbance = DisturbanceSignal::uniform_random(sc.d_tilde, sc.disturbance.seed);
  else if (disturbance_mode.empty())
    disturbance = sc.disturbance.signal(sc.d_tilde);
  else
    throw std::runtime_error("unknown disturbance mode: " + disturbance_mode);

  // Pre-execution check: the planned word itself must satisfy the formula.
  {
    const FormulaPtr formula = parse_mitl(sc.formula);
    const Tba tba = build_tba(validate_fragment(*formula));
    if (!accepts(tba, word_from_plan(plan, sc))) {
      std::cout << "plan does not satisfy the scenario formula\n";
      return kExitFailure;
    }
  }

  const ExecutionReport report =
      execute_plan(plan, sc, p.model, p.gains, p.config, disturbance);

  fs::create_directories(outdir);
  OrderedJson j;
  j["scenario"] = fs::path(scenario_path).filename().string();
  j["formula"] = sc.formula;
  j["formula_digest"] = fnv1a_digest(sc.formula);
  j["plan_digest"] = plan.formula_digest;
  j["disturbance"] = OrderedJson{{"mode", disturbance_mode.empty() ? sc.disturbance.kind
                                                                   : disturbance_mode},
                                 {"d_tilde", sc.d_tilde},
                                 {"seed", sc.disturbance.seed}};
  j["gains"] = OrderedJson{{"k", p.gains.k},        {"rho", p.gains.rho},
                           {"alpha1", p.gains.alpha1}, {"alpha2", p.gains.alpha2},
                           {"r_e", p.gains.r_e},    {"r_v", p.gains.r_v}};
  j["planned_word"] = timed_word_to_json(report.planned_word);
  j["realized_word"] = timed_word_to_json(report.realized_word);
  j["accepted"] = report.accepted;
  j["aborted"] = report.aborted;
  j["abort_reason"] = report.abort_reason;
  j["satisfied"] = report.satisfied();

  OrderedJson legs = OrderedJson::array();
  for (std::size_t i = 0; i < report.legs.size(); ++i) {
    const TransitionResult& leg = report.legs[i];
    std::ostringstream name;
    name << "leg_" << i << "_R" << leg.source << "_to_R" << leg.dest << ".csv";
    write_leg_csv((fs::path(outdir) / name.str()).string(), leg);
    OrderedJson lj = leg_summary_json(leg, p.gains);
    lj["csv"] = name.str();
    legs.push_back(lj);
  }
  j["legs"] = legs;
  write_json_file((fs::path(outdir) / "execution.json").string(), j);

  if (report.satisfied()) {
    std::cout << "SATISFIED\n";
    return kExitOk;
  }
  std::cout << (report.aborted ? "ABORTED: " + report.abort_reason : "NOT SATISFIED") << "\n";
  return kExitFailure;
}

int cmd_report(const std::string& rundir, const std::string& out_path,
               const std::string& plot_path) {
  const OrderedJson exec = read_json_file((fs::path(rundir) / "execution.json").string());
  TubeGains gains;
  gains.r_e = exec.at("gains").at("r_e").get<double>();
  gains.r_v = exec.at("gains").at("r_v").get<double>();

  bool recheck_all_ok = true;
  OrderedJson legs = OrderedJson::array();
  double max_e = 0.0, max_v = 0.0;
  Rat total{0};

  std::ostringstream plot;
  plot.precision(17);
  plot << "t,leg,chi_0,chi_1,v_0,v_1,chibar_0,chibar_1,vbar_0,vbar_1,"
          "e_tilde,v_tilde,tube_r_e,tube_r_v\n";

  int leg_index = 0;
  for (const OrderedJson& lj : exec.at("legs")) {
    const std::string csv = (fs::path(rundir) / lj.at("csv").get<std::string>()).string();
    const int entry = lj.at("tube_entry_substep").get<int>();
    const bool recheck = recheck_tube_from_csv(csv, gains, entry);
    const bool stored = lj.at("tube_ok").get<bool>();
    if (recheck != stored) recheck_all_ok = false;

    max_e = std::max(max_e, lj.at("max_e_tilde").get<double>());
    max_v = std::max(max_v, lj.at("max_v_tilde").get<double>());
    total = total + rat_from_json(lj.at("duration"));

    OrderedJson item = lj;
    item["containment_recheck_ok"] = recheck;
    item["recheck_matches_stored"] = recheck == stored;
    legs.push_back(item);

    // Plot rows: re-read the CSV and append the tube columns.
    const std::string text = read_text_file(csv);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    bool first_row = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (leg_index > 0 && first_row) {  // duplicate of the previous leg's last state
        first_row = false;
        continue;
      }
      first_row = false;
      std::vector<double> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
      // Columns: t, chi(2), v(2), chibar(2), vbar(2), u(2), ubar(2), d(2).
      const double et = std::hypot(cells[1] - cells[5], cells[2] - cells[6]);
      const double vt = std::hypot(cells[3] - cells[7], cells[4] - cells[8]);
      plot << cells[0] << "," << leg_index;
      for (int c = 1; c <= 8; ++c) plot << "," << cells[c];
      plot << "," << et << "," << vt << "," << gains.r_e << "," << gains.r_v << "\n";
    }
    ++leg_index;
  }

  OrderedJson j;
  j["satisfied"] = exec.at("satisfied");
  j["accepted"] = exec.at("accepted");
  j["aborted"] = exec.at("aborted");
  j["realized_word"] = exec.at("realized_word");
  j["total_duration"] = rat_to_json(total);
  j["total_duration_seconds"] = to_double(total);
  j["max_e_tilde"] = max_e;
  j["max_v_tilde"] = max_v;
  j["tube_r_e"] = gains.r_e;
  j["tube_r_v"] = gains.r_v;
  j["containment_recheck_ok"] = recheck_all_ok;
  j["legs"] = legs;
  write_json_file(out_path, j);
  write_text_file(plot_path, plot.str());

  std::cout << "report: " << legs.size() << " leg(s), total " << to_double(total)
            << " s, recheck " << (recheck_all_ok ? "consistent" : "MISMATCH") << "\n";
  std::cout << "wrote " << out_path << " and " << plot_path << "\n";
  return recheck_all_ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tube-based NMPC navigation, WTS abstraction and MITL plan synthesis"};
  app.require_subcommand(1);

  std::string scenario_path, wts_path, plan_path, out_path, dot_path, rundir;
  std::string pairs_mode = "lazy", disturbance_mode, plot_path;
  int threads = 0;
  std::optional<std::uint64_t> seed_override;

  CLI::App* validate = app.add_subcommand("validate", "Check Assumptions 1-4 on a scenario");
  validate->add_option("scenario", scenario_path, "scenario YAML")->required();

  CLI::App* design =
      app.add_subcommand("design", "Print gains, tightened sets and terminal ingredients");
  design->add_option("scenario", scenario_path, "scenario YAML")->required();

  CLI::App* abstract_cmd =
      app.add_subcommand("abstract", "Build the WTS by running all navigation legs");
  abstract_cmd->add_option("scenario", scenario_path, "scenario YAML")->required();
  abstract_cmd->add_option("--pairs", pairs_mode, "lazy (skip unsafe targets) | all")
      ->check(CLI::IsMember({"lazy", "all"}));
  abstract_cmd->add_option("-o,--out", out_path, "output WTS JSON")->default_val("wts.json");
  abstract_cmd->add_option("--dot", dot_path, "also write a GraphViz dump");
  abstract_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* synthesize =
      app.add_subcommand("synthesize", "Search the WTS x TBA product for an accepting run");
  synthesize->add_option("scenario", scenario_path, "scenario YAML")->required();
  synthesize->add_option("--wts", wts_path, "WTS JSON from `abstract`")->required();
  synthesize->add_option("-o,--out", out_path, "output plan JSON")->default_val("plan.json");
  synthesize->add_option("--dot", dot_path, "write the explored product graph");

  CLI::App* run = app.add_subcommand("run", "Execute a synthesized plan on the real system");
  run->add_option("scenario", scenario_path, "scenario YAML")->required();
  run->add_option("--plan", plan_path, "plan JSON from `synthesize`")->required();
  run->add_option("--seed", seed_override, "override the scenario seed");
  run->add_option("--disturbance", disturbance_mode, "zero | paper | random")
      ->check(CLI::IsMember({"zero", "paper", "random"}));
  run->add_option("--outdir", out_path, "run artifact directory")->default_val("run_out");

  CLI::App* report = app.add_subcommand("report", "Aggregate a run directory into JSON + CSV");
  report->add_option("rundir", rundir, "directory written by `run`")->required();
  report->add_option("-o,--out", out_path, "output JSON")->default_val("report.json");
  report->add_option("--plot", plot_path, "plot-ready CSV")->default_val("plot.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (design->parsed()) return cmd_design(scenario_path);
    if (abstract_cmd->parsed())
      return cmd_abstract(scenario_path, pairs_mode, out_path, dot_path, threads);
    if (synthesize->parsed()) return cmd_synthesize(scenario_path, wts_path, out_path, dot_path);
    if (run->parsed())
      return cmd_run(scenario_path, plan_path, seed_override, disturbance_mode, out_path);
    if (report->parsed()) return cmd_report(rundir, out_path, plot_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

#include "tubenav/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tubenav {

OrderedJson rat_to_json(const Rat& r) {
  return OrderedJson{{"num", r.numerator()}, {"den", r.denominator()}};
}

Rat rat_from_json(const OrderedJson& j) {
  return Rat(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

OrderedJson wts_to_json(const WtsBuildResult& result) {
  const Wts& wts = result.wts;
  OrderedJson j;
  j["states"] = wts.states;
  j["initial"] = wts.initial;
  OrderedJson labels = OrderedJson::object();
  for (int s : wts.states) {
    const auto it = wts.labels.find(s);
    labels[std::to_string(s)] =
        it == wts.labels.end() ? std::set<std::string>{} : it->second;
  }
  j["labels"] = labels;
  j["alphabet"] = wts.alphabet;
  OrderedJson transitions = OrderedJson::array();
  for (const Wts::Transition& t : wts.transitions)
    transitions.push_back(OrderedJson{
        {"source", t.source}, {"dest", t.dest}, {"duration", rat_to_json(t.duration)}});
  j["transitions"] = transitions;
  OrderedJson failures = OrderedJson::array();
  for (const FailedLeg& f : result.failures)
    failures.push_back(
        OrderedJson{{"source", f.source}, {"dest", f.dest}, {"reason", f.reason}});
  j["failures"] = failures;
  return j;
}

Wts wts_from_json(const OrderedJson& j) {
  Wts wts;
  wts.states = j.at("states").get<std::vector<int>>();
  wts.initial = j.at("initial").get<int>();
  for (const auto& [key, value] : j.at("labels").items())
    wts.labels[std::stoi(key)] = value.get<std::set<std::string>>();
  wts.alphabet = j.at("alphabet").get<std::set<std::string>>();
  for (const OrderedJson& t : j.at("transitions"))
    wts.transitions.push_back({t.at("source").get<int>(), t.at("dest").get<int>(),
                               rat_from_json(t.at("duration"))});
  return wts;
}

OrderedJson plan_to_json(const TimedPlan& plan) {
  OrderedJson j;
  j["formula"] = plan.formula;
  j["formula_digest"] = plan.formula_digest;
  OrderedJson run = OrderedJson::array();
  for (const TimedRunEntry& e : plan.run)
    run.push_back(OrderedJson{{"region", e.region}, {"stamp", rat_to_json(e.stamp)}});
  j["run"] = run;
  OrderedJson goals = OrderedJson::array();
  for (const PlanLeg& g : plan.goals)
    goals.push_back(OrderedJson{{"source", g.source},
                                {"dest", g.dest},
                                {"start", rat_to_json(g.start)},
                                {"arrival", rat_to_json(g.arrival)}});
  j["goals"] = goals;
  return j;
}

TimedPlan plan_from_json(const OrderedJson& j) {
  TimedPlan plan;
  plan.formula = j.at("formula").get<std::string>();
  plan.formula_digest = j.at("formula_digest").get<std::string>();
  for (const OrderedJson& e : j.at("run"))
    plan.run.push_back({e.at("region").get<int>(), rat_from_json(e.at("stamp"))});
  for (const OrderedJson& g : j.at("goals"))
    plan.goals.push_back({g.at("source").get<int>(), g.at("dest").get<int>(),
                          rat_from_json(g.at("start")), rat_from_json(g.at("arrival"))});
  return plan;
}

OrderedJson timed_word_to_json(const TimedWord& word) {
  OrderedJson j = OrderedJson::array();
  for (const TimedLetter& l : word)
    j.push_back(OrderedJson{{"stamp", rat_to_json(l.stamp)}, {"letter", l.letter}});
  return j;
}

OrderedJson leg_summary_json(const TransitionResult& leg, const TubeGains& gains) {
  OrderedJson j;
  j["source"] = leg.source;
  j["dest"] = leg.dest;
  j["duration"] = rat_to_json(leg.duration);
  j["steps"] = leg.steps;
  j["feasible"] = leg.feasible;
  j["violations"] = leg.violations;
  j["thr"] = leg.thr;
  j["r_e"] = gains.r_e;
  j["r_v"] = gains.r_v;
  j["max_e_tilde"] = leg.max_e_tilde;
  j["max_v_tilde"] = leg.max_v_tilde;
  j["tube_started_inside"] = leg.tube_started_inside;
  j["tube_entry_substep"] = leg.tube_entry_substep;
  j["tube_ok"] = leg.tube_ok;
  j["workspace_ok"] = leg.workspace_ok;
  j["velocity_ok"] = leg.velocity_ok;
  j["forbidden_ok"] = leg.forbidden_ok;
  if (std::isfinite(leg.min_forbidden_clearance))
    j["min_forbidden_clearance"] = leg.min_forbidden_clearance;
  else
    j["min_forbidden_clearance"] = nullptr;
  j["unsafe_contacts"] = leg.unsafe_contacts;
  j["first_feasible_step"] = leg.first_feasible_step;
  return j;
}

namespace {

void write_vector_cols(std::ostream& out, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << "," << v(i);
}

}  // namespace

void write_leg_csv(const std::string& path, const TransitionResult& leg) {
  const int n = static_cast<int>(leg.real_traj.chis.empty() ? 0 : leg.real_traj.chis[0].size());
  std::ostringstream out;
  out.precision(17);
  const auto header_block = [&](const std::string& name) {
    for (int i = 0; i < n; ++i) out << "," << name << "_" << i;
  };
  out << "t";
  header_block("chi");
  header_block("v");
  header_block("chibar");
  header_block("vbar");
  header_block("u");
  header_block("ubar");
  header_block("d");
  out << "\n";
  const std::size_t rows = leg.real_traj.size();
  for (std::size_t i = 0; i < rows; ++i) {
    out << leg.real_traj.times[i];
    write_vector_cols(out, leg.real_traj.chis[i]);
    write_vector_cols(out, leg.real_traj.vs[i]);
    write_vector_cols(out, leg.nominal_traj.chis[i]);
    write_vector_cols(out, leg.nominal_traj.vs[i]);
    const std::size_t k = leg.u_log.empty() ? 0 : std::min(i, leg.u_log.size() - 1);
    if (!leg.u_log.empty()) {
      write_vector_cols(out, leg.u_log[k]);
      write_vector_cols(out, leg.u_bar_log[k]);
      write_vector_cols(out, leg.d_log[k]);
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

bool recheck_tube_from_csv(const std::string& path, const TubeGains& gains, int entry_row,
                           double tol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("CSV missing column " + name + ": " + path);
  };
  std::vector<int> chi_cols, v_cols, chibar_cols, vbar_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h.rfind("chi_", 0) == 0) chi_cols.push_back(static_cast<int>(i));
    if (h.rfind("v_", 0) == 0) v_cols.push_back(static_cast<int>(i));
    if (h.rfind("chibar_", 0) == 0) chibar_cols.push_back(static_cast<int>(i));
    if (h.rfind("vbar_", 0) == 0) vbar_cols.push_back(static_cast<int>(i));
  }
  (void)col_of("t");
  if (entry_row < 0) return false;  // tube never entered

  int row = 0;
  bool ok = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    if (row >= entry_row) {
      double e2 = 0.0, v2 = 0.0;
      for (std::size_t i = 0; i < chi_cols.size(); ++i) {
        const double de = cells[chi_cols[i]] - cells[chibar_cols[i]];
        const double dv = cells[v_cols[i]] - cells[vbar_cols[i]];
        e2 += de * de;
        v2 += dv * dv;
      }
      if (std::sqrt(e2) > gains.r_e + tol || std::sqrt(v2) > gains.r_v + tol) ok = false;
    }
    ++row;
  }
  return ok;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

OrderedJson read_json_file(const std::string& path) {
  return OrderedJson::parse(read_text_file(path));
}

void write_json_file(const std::string& path, const OrderedJson& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace tubenav

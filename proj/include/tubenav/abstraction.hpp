#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tubenav/navigator.hpp"
#include "tubenav/scenario.hpp"

namespace tubenav {

// Weighted Transition System over the RoI: states are RoI ids, transitions
// carry exact rational durations measured by navigate (d ≡ 0), labels map
// each RoI to its atomic propositions.
struct Wts {
  struct Transition {
    int source = 0;
    int dest = 0;
    Rat duration{0};
  };

  std::vector<int> states;  // sorted RoI ids
  int initial = 0;
  std::vector<Transition> transitions;  // sorted by (source, dest)
  std::map<int, std::set<std::string>> labels;
  std::set<std::string> alphabet;

  std::optional<Rat> duration(int source, int dest) const;
  std::vector<const Transition*> out_of(int source) const;
  const std::set<std::string>& labels_of(int state) const;
};

struct FailedLeg {
  int source = 0;
  int dest = 0;
  std::string reason;
};

struct WtsBuildResult {
  Wts wts;
  std::vector<FailedLeg> failures;  // excluded/failed pairs with reasons
};

// Attempts a navigation leg for every ordered pair of candidate RoI (by
// default the non-unsafe ones; include_unsafe_targets widens to all), from
// the source center at rest with d ≡ 0, in parallel. Pairs violating the
// Assumption 4 spacing are excluded up front; per-destination terminal
// ingredients are designed once, sequentially, for determinism. Feasible
// legs become transitions; everything else lands in `failures`. Throws when
// χ(0)'s robot ball is inside no RoI, or when candidates exist but no
// transition leaves the initial RoI.
WtsBuildResult build_wts(const Scenario& scenario, const RobotModel& model,
                         const TubeGains& gains, const FhocpConfig& config,
                         bool include_unsafe_targets = false, int threads = 0);

struct TimedRunEntry {
  int region = 0;
  Rat stamp{0};
};

// Definition-3 timed run of a region sequence: τ(0)=0 and τ(l+1)=τ(l)+𝔱,
// with exact rational accumulation. Throws std::invalid_argument when the
// sequence is empty, does not start at the initial state, or uses a pair
// that is not a transition.
std::vector<TimedRunEntry> timed_run_of(const Wts& wts, const std::vector<int>& plan);

// GraphViz rendering of the WTS (labels shown, durations on edges).
std::string to_dot(const Wts& wts);

}  // namespace tubenav

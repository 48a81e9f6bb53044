#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tubenav/rational.hpp"

namespace tubenav {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

class FragmentError : public std::runtime_error {
 public:
  explicit FragmentError(const std::string& what) : std::runtime_error(what) {}
};

// Closed time interval [lo, hi]; hi absent means [lo, ∞).
struct TimeInterval {
  Rat lo{0};
  std::optional<Rat> hi;

  bool unbounded() const { return !hi.has_value(); }
  bool contains(const Rat& t) const { return t >= lo && (!hi || t <= *hi); }
  std::string str() const;
};

// MITL abstract syntax. Temporal operators carry an interval; And/Or/Until
// have two children, the other non-atoms one.
struct Formula {
  enum class Kind { Atom, Not, And, Or, Always, Eventually, Until, Next };
  Kind kind = Kind::Atom;
  std::string atom;
  TimeInterval interval;
  std::vector<std::unique_ptr<Formula>> children;
};
using FormulaPtr = std::unique_ptr<Formula>;

// ASCII grammar: G/F/X '[a,b]' (prefix), U '[a,b]' (infix), '!', '&', '|',
// parentheses, atoms as identifiers; interval bounds are decimals or p/q
// fractions (nonempty: a < b), the upper bound may be 'inf'; ']' and ')'
// both close an interval. Precedence: ! > U > & > |. When an alphabet is
// given, atoms outside it are parse errors.
FormulaPtr parse_mitl(const std::string& text);
FormulaPtr parse_mitl(const std::string& text, const std::set<std::string>& sigma);
std::string to_string(const Formula& f);

// An atom or its negation.
struct Lit {
  std::string atom;
  bool negated = false;

  bool satisfied_by(const std::set<std::string>& letter) const {
    return letter.count(atom) ? !negated : negated;
  }
  std::string str() const { return (negated ? "!" : "") + atom; }
};

// Supported fragment: a conjunction of
//   □_[0,∞) ℓ    (Always),
//   ◇_[a,b] ℓ    (Eventually, bounded),
//   ℓ₁ U_[a,b] ℓ₂ (Until, bounded),
//   ◯_[a,b] ℓ    (Next, bounded),
// with ℓ, ℓ₁, ℓ₂ literals. For Until, `lit` is the right operand ℓ₂ and
// `lit_left` the invariant ℓ₁.
enum class ConjunctKind { Always, Eventually, Until, Next };

struct Conjunct {
  ConjunctKind kind = ConjunctKind::Always;
  Lit lit;
  Lit lit_left;
  TimeInterval interval;

  std::string str() const;
};

// Throws FragmentError naming the offending construct (disjunction, nested
// temporal operators, unbounded ◇/U/◯, bounded □, non-literal operands).
std::vector<Conjunct> validate_fragment(const Formula& f);

// A timed word: the sequence of label sets observed at the region visits,
// position 0 being the initial region at stamp 0. Stamps are nondecreasing.
struct TimedLetter {
  Rat stamp{0};
  std::set<std::string> letter;
};
using TimedWord = std::vector<TimedLetter>;

// One guarded edge of a monitor location. The guard is a conjunction of
// literals plus a closed clock window on the single never-reset clock
// (absolute time). Edges are ordered: the first match is taken.
struct TbaEdge {
  std::vector<Lit> guard;
  std::optional<Rat> clock_lo;
  std::optional<Rat> clock_hi;
  int target = 0;

  bool matches(const std::set<std::string>& letter, const Rat& stamp) const;
};

// Deterministic monitor for one conjunct. Location 0 is initial; `sink` is
// the absorbing rejecting location. Every location has a default edge, so
// step() is total.
struct Monitor {
  std::vector<std::string> loc_names;
  std::vector<std::vector<TbaEdge>> edges;
  std::set<int> accepting;
  int sink = -1;

  int size() const { return static_cast<int>(loc_names.size()); }
  int step(int loc, const std::set<std::string>& letter, const Rat& stamp) const;
};

// Timed Büchi automaton for the full conjunction: the synchronous product of
// the per-conjunct monitors over one global clock. Product locations are
// tuples of component locations (mixed-radix encodable); a product location
// is rejecting as soon as one component sits in its sink, and accepting when
// every component is in an accepting location.
struct Tba {
  std::vector<Conjunct> conjuncts;
  std::vector<Monitor> monitors;
  std::set<std::string> atoms;
  Rat horizon_bound{0};  // largest finite interval endpoint

  std::vector<int> initial_locs() const;
  std::vector<int> step(const std::vector<int>& locs, const std::set<std::string>& letter,
                        const Rat& stamp) const;
  bool is_accepting(const std::vector<int>& locs) const;
  bool is_rejecting(const std::vector<int>& locs) const;

  // Mixed-radix encoding of a location tuple.
  std::size_t encode(const std::vector<int>& locs) const;
  std::vector<int> decode(std::size_t idx) const;

  // Number of product locations before any pruning: the plain product of the
  // component location counts.
  std::size_t locations_before_pruning() const;
  // Product locations reachable under the synchronized semantics (letters
  // over the formula atoms, nondecreasing stamps), via a region abstraction
  // of the clock.
  std::size_t reachable_locations() const;

  // Stamp strictly beyond every interval bound, used for the suffix check.
  Rat suffix_stamp() const { return horizon_bound + Rat(1); }
};

Tba build_tba(const std::vector<Conjunct>& conjuncts);

// GraphViz rendering of the monitors (one cluster per conjunct; the single
// clock is named x).
std::string to_dot(const Tba& tba);

// Runs the word through the automaton (all positions, including position 0),
// then applies the suffix check: the final letter is consumed once more at a
// stamp beyond every interval bound, modelling the system staying in its
// last region forever. Empty words are accepted iff the initial product
// location is accepting.
bool accepts(const Tba& tba, const TimedWord& word);

// Direct evaluation of the point-based semantics, used as the oracle:
//   □ℓ: ∀i ℓ@i;  ◇_[a,b]ℓ: ∃i (τ_i∈[a,b] ∧ ℓ@i);
//   ℓ₁U_[a,b]ℓ₂: ∃j (τ_j∈[a,b] ∧ ℓ₂@j ∧ ∀k<j ℓ₁@k);
//   ◯_[a,b]ℓ: |w|≥2 ∧ τ₁∈[a,b] ∧ ℓ@1.
bool brute_force_satisfies(const std::vector<Conjunct>& conjuncts, const TimedWord& word);

}  // namespace tubenav

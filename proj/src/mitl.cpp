#include "tubenav/mitl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace tubenav {

std::string TimeInterval::str() const {
  return "[" + rat_to_string(lo) + "," + (hi ? rat_to_string(*hi) : std::string("inf")) + "]";
}

std::string Conjunct::str() const {
  switch (kind) {
    case ConjunctKind::Always:
      return "G" + interval.str() + " " + lit.str();
    case ConjunctKind::Eventually:
      return "F" + interval.str() + " " + lit.str();
    case ConjunctKind::Until:
      return lit_left.str() + " U" + interval.str() + " " + lit.str();
    case ConjunctKind::Next:
      return "X" + interval.str() + " " + lit.str();
  }
  return {};
}

namespace {

struct Token {
  enum Type { Ident, Number, Bang, Amp, Pipe, LParen, RParen, LBrack, RBrack, Comma, End };
  Type type = End;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      out.push_back({Token::Ident, s.substr(i, j - i), start});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      } else if (j < s.size() && s[j] == '/') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      out.push_back({Token::Number, s.substr(i, j - i), start});
      i = j;
      continue;
    }
    Token::Type t;
    switch (c) {
      case '!': t = Token::Bang; break;
      case '&': t = Token::Amp; break;
      case '|': t = Token::Pipe; break;
      case '(': t = Token::LParen; break;
      case ')': t = Token::RParen; break;
      case '[': t = Token::LBrack; break;
      case ']': t = Token::RBrack; break;
      case ',': t = Token::Comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({t, std::string(1, c), start});
    ++i;
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

bool is_temporal_ident(const Token& t, const char* name) {
  return t.type == Token::Ident && t.text == name;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_disj();
    expect(Token::End, "trailing input after formula");
    return f;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token eat() { return toks_[i_++]; }
  Token expect(Token::Type t, const std::string& what) {
    if (peek().type != t) throw ParseError("expected " + what, peek().pos);
    return eat();
  }

  static FormulaPtr node(Formula::Kind k) {
    auto f = std::make_unique<Formula>();
    f->kind = k;
    return f;
  }

  TimeInterval parse_interval() {
    expect(Token::LBrack, "'[' opening a time interval");
    const Token lo_tok = expect(Token::Number, "interval lower bound");
    TimeInterval iv;
    iv.lo = rat_from_string(lo_tok.text);
    expect(Token::Comma, "',' in time interval");
    if (is_temporal_ident(peek(), "inf")) {
      eat();
    } else {
      const Token hi_tok = expect(Token::Number, "interval upper bound or 'inf'");
      iv.hi = rat_from_string(hi_tok.text);
    }
    if (peek().type == Token::RBrack || peek().type == Token::RParen)
      eat();
    else
      throw ParseError("expected ']' or ')' closing a time interval", peek().pos);
    if (iv.lo < Rat(0)) throw ParseError("interval lower bound must be nonnegative", lo_tok.pos);
    if (iv.hi && *iv.hi <= iv.lo)
      throw ParseError("interval must be nonempty (lower < upper)", lo_tok.pos);
    return iv;
  }

  FormulaPtr parse_disj() {
    FormulaPtr left = parse_conj();
    while (peek().type == Token::Pipe) {
      eat();
      auto f = node(Formula::Kind::Or);
      f->children.push_back(std::move(left));
      f->children.push_back(parse_conj());
      left = std::move(f);
    }
    return left;
  }

  FormulaPtr parse_conj() {
    FormulaPtr left = parse_until();
    while (peek().type == Token::Amp) {
      eat();
      auto f = node(Formula::Kind::And);
      f->children.push_back(std::move(left));
      f->children.push_back(parse_until());
      left = std::move(f);
    }
    return left;
  }

  FormulaPtr parse_until() {
    FormulaPtr left = parse_unary();
    if (is_temporal_ident(peek(), "U")) {
      eat();
      auto f = node(Formula::Kind::Until);
      f->interval = parse_interval();
      f->children.push_back(std::move(left));
      f->children.push_back(parse_unary());
      left = std::move(f);
    }
    return left;
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    if (t.type == Token::Bang) {
      eat();
      auto f = node(Formula::Kind::Not);
      f->children.push_back(parse_unary());
      return f;
    }
    if (is_temporal_ident(t, "G") || is_temporal_ident(t, "F") || is_temporal_ident(t, "X")) {
      const std::string op = eat().text;
      auto f = node(op == "G"   ? Formula::Kind::Always
                    : op == "F" ? Formula::Kind::Eventually
                                : Formula::Kind::Next);
      f->interval = parse_interval();
      f->children.push_back(parse_unary());
      return f;
    }
    if (t.type == Token::LParen) {
      eat();
      FormulaPtr f = parse_disj();
      expect(Token::RParen, "')'");
      return f;
    }
    if (t.type == Token::Ident) {
      if (t.text == "U") throw ParseError("until operator needs a left operand", t.pos);
      auto f = node(Formula::Kind::Atom);
      f->atom = eat().text;
      return f;
    }
    throw ParseError("expected a formula", t.pos);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

std::string wrap(const Formula& f) {
  const std::string s = to_string(f);
  if (f.kind == Formula::Kind::Atom) return s;
  if (f.kind == Formula::Kind::Not && f.children[0]->kind == Formula::Kind::Atom) return s;
  return "(" + s + ")";
}

}  // namespace

namespace {

void check_atoms(const Formula& f, const std::set<std::string>& sigma) {
  if (f.kind == Formula::Kind::Atom && !sigma.count(f.atom))
    throw ParseError("unknown atom '" + f.atom + "'", 0);
  for (const auto& child : f.children) check_atoms(*child, sigma);
}

}  // namespace

FormulaPtr parse_mitl(const std::string& text) { return Parser(text).parse(); }

FormulaPtr parse_mitl(const std::string& text, const std::set<std::string>& sigma) {
  FormulaPtr f = Parser(text).parse();
  check_atoms(*f, sigma);
  return f;
}

std::string to_string(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return f.atom;
    case Formula::Kind::Not:
      return "!" + wrap(*f.children[0]);
    case Formula::Kind::And:
      return wrap(*f.children[0]) + " & " + wrap(*f.children[1]);
    case Formula::Kind::Or:
      return wrap(*f.children[0]) + " | " + wrap(*f.children[1]);
    case Formula::Kind::Always:
      return "G" + f.interval.str() + " " + wrap(*f.children[0]);
    case Formula::Kind::Eventually:
      return "F" + f.interval.str() + " " + wrap(*f.children[0]);
    case Formula::Kind::Until:
      return wrap(*f.children[0]) + " U" + f.interval.str() + " " + wrap(*f.children[1]);
    case Formula::Kind::Next:
      return "X" + f.interval.str() + " " + wrap(*f.children[0]);
  }
  return {};
}

namespace {

std::optional<Lit> as_literal(const Formula& f) {
  if (f.kind == Formula::Kind::Atom) return Lit{f.atom, false};
  if (f.kind == Formula::Kind::Not && f.children[0]->kind == Formula::Kind::Atom)
    return Lit{f.children[0]->atom, true};
  return std::nullopt;
}

Lit literal_operand(const Formula& f, int child, const char* op) {
  const auto lit = as_literal(*f.children[static_cast<std::size_t>(child)]);
  if (!lit)
    throw FragmentError(std::string(op) +
                        " operand must be a literal (atoms and negated atoms only; nested "
                        "temporal operators are outside the supported fragment)");
  return *lit;
}

void flatten_and(const Formula& f, std::vector<const Formula*>& leaves) {
  if (f.kind == Formula::Kind::And) {
    flatten_and(*f.children[0], leaves);
    flatten_and(*f.children[1], leaves);
  } else {
    leaves.push_back(&f);
  }
}

}  // namespace

std::vector<Conjunct> validate_fragment(const Formula& f) {
  std::vector<const Formula*> leaves;
  flatten_and(f, leaves);
  std::vector<Conjunct> out;
  out.reserve(leaves.size());
  for (const Formula* leaf : leaves) {
    Conjunct c;
    c.interval = leaf->interval;
    switch (leaf->kind) {
      case Formula::Kind::Always:
        if (leaf->interval.lo != Rat(0) || leaf->interval.hi)
          throw FragmentError("always must carry the interval [0,inf]");
        c.kind = ConjunctKind::Always;
        c.lit = literal_operand(*leaf, 0, "always");
        break;
      case Formula::Kind::Eventually:
        if (!leaf->interval.hi) throw FragmentError("eventually requires a bounded interval");
        c.kind = ConjunctKind::Eventually;
        c.lit = literal_operand(*leaf, 0, "eventually");
        break;
      case Formula::Kind::Until:
        if (!leaf->interval.hi) throw FragmentError("until requires a bounded interval");
        c.kind = ConjunctKind::Until;
        c.lit_left = literal_operand(*leaf, 0, "until");
        c.lit = literal_operand(*leaf, 1, "until");
        break;
      case Formula::Kind::Next:
        if (!leaf->interval.hi) throw FragmentError("next requires a bounded interval");
        c.kind = ConjunctKind::Next;
        c.lit = literal_operand(*leaf, 0, "next");
        break;
      case Formula::Kind::Or:
        throw FragmentError("disjunction is outside the supported fragment");
      case Formula::Kind::Atom:
      case Formula::Kind::Not:
        throw FragmentError(
            "bare literals are outside the supported fragment; wrap them in a temporal "
            "operator");
      case Formula::Kind::And:
        break;  // unreachable: flattened away
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool TbaEdge::matches(const std::set<std::string>& letter, const Rat& stamp) const {
  for (const Lit& l : guard)
    if (!l.satisfied_by(letter)) return false;
  if (clock_lo && stamp < *clock_lo) return false;
  if (clock_hi && stamp > *clock_hi) return false;
  return true;
}

int Monitor::step(int loc, const std::set<std::string>& letter, const Rat& stamp) const {
  for (const TbaEdge& e : edges[static_cast<std::size_t>(loc)])
    if (e.matches(letter, stamp)) return e.target;
  throw std::logic_error("monitor location has no matching edge");
}

namespace {

Monitor make_safety(const Lit& lit) {
  Monitor m;
  m.loc_names = {"ok", "violated"};
  m.edges.resize(2);
  m.edges[0] = {{{lit}, std::nullopt, std::nullopt, 0}, {{}, std::nullopt, std::nullopt, 1}};
  m.edges[1] = {{{}, std::nullopt, std::nullopt, 1}};
  m.accepting = {0};
  m.sink = 1;
  return m;
}

Monitor make_eventually(const Lit& lit, const TimeInterval& iv) {
  Monitor m;
  m.loc_names = {"wait", "sat", "sink"};
  m.edges.resize(3);
  m.edges[0] = {{{lit}, iv.lo, *iv.hi, 1},
                {{}, std::nullopt, *iv.hi, 0},
                {{}, std::nullopt, std::nullopt, 2}};
  m.edges[1] = {{{}, std::nullopt, std::nullopt, 1}};
  m.edges[2] = {{{}, std::nullopt, std::nullopt, 2}};
  m.accepting = {1};
  m.sink = 2;
  return m;
}

Monitor make_until(const Lit& left, const Lit& right, const TimeInterval& iv) {
  Monitor m;
  m.loc_names = {"wait", "sat", "sink"};
  m.edges.resize(3);
  m.edges[0] = {{{right}, iv.lo, *iv.hi, 1},
                {{left}, std::nullopt, *iv.hi, 0},
                {{}, std::nullopt, std::nullopt, 2}};
  m.edges[1] = {{{}, std::nullopt, std::nullopt, 1}};
  m.edges[2] = {{{}, std::nullopt, std::nullopt, 2}};
  m.accepting = {1};
  m.sink = 2;
  return m;
}

Monitor make_next(const Lit& lit, const TimeInterval& iv) {
  Monitor m;
  m.loc_names = {"start", "armed", "sat", "sink"};
  m.edges.resize(4);
  m.edges[0] = {{{}, std::nullopt, std::nullopt, 1}};
  m.edges[1] = {{{lit}, iv.lo, *iv.hi, 2}, {{}, std::nullopt, std::nullopt, 3}};
  m.edges[2] = {{{}, std::nullopt, std::nullopt, 2}};
  m.edges[3] = {{{}, std::nullopt, std::nullopt, 3}};
  m.accepting = {2};
  m.sink = 3;
  return m;
}

}  // namespace

Tba build_tba(const std::vector<Conjunct>& conjuncts) {
  Tba tba;
  tba.conjuncts = conjuncts;
  for (const Conjunct& c : conjuncts) {
    switch (c.kind) {
      case ConjunctKind::Always:
        tba.monitors.push_back(make_safety(c.lit));
        break;
      case ConjunctKind::Eventually:
        tba.monitors.push_back(make_eventually(c.lit, c.interval));
        break;
      case ConjunctKind::Until:
        tba.monitors.push_back(make_until(c.lit_left, c.lit, c.interval));
        tba.atoms.insert(c.lit_left.atom);
        break;
      case ConjunctKind::Next:
        tba.monitors.push_back(make_next(c.lit, c.interval));
        break;
    }
    tba.atoms.insert(c.lit.atom);
    tba.horizon_bound = std::max(tba.horizon_bound, c.interval.hi.value_or(c.interval.lo));
  }
  return tba;
}

std::vector<int> Tba::initial_locs() const {
  return std::vector<int>(monitors.size(), 0);
}

std::vector<int> Tba::step(const std::vector<int>& locs, const std::set<std::string>& letter,
                           const Rat& stamp) const {
  std::vector<int> next(locs.size());
  for (std::size_t i = 0; i < monitors.size(); ++i)
    next[i] = monitors[i].step(locs[i], letter, stamp);
  return next;
}

bool Tba::is_accepting(const std::vector<int>& locs) const {
  for (std::size_t i = 0; i < monitors.size(); ++i)
    if (!monitors[i].accepting.count(locs[i])) return false;
  return true;
}

bool Tba::is_rejecting(const std::vector<int>& locs) const {
  for (std::size_t i = 0; i < monitors.size(); ++i)
    if (locs[i] == monitors[i].sink) return true;
  return false;
}

std::size_t Tba::encode(const std::vector<int>& locs) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < monitors.size(); ++i)
    idx = idx * static_cast<std::size_t>(monitors[i].size()) + static_cast<std::size_t>(locs[i]);
  return idx;
}

std::vector<int> Tba::decode(std::size_t idx) const {
  std::vector<int> locs(monitors.size(), 0);
  for (std::size_t i = monitors.size(); i-- > 0;) {
    const auto sz = static_cast<std::size_t>(monitors[i].size());
    locs[i] = static_cast<int>(idx % sz);
    idx /= sz;
  }
  return locs;
}

std::size_t Tba::locations_before_pruning() const {
  std::size_t total = 1;
  for (const Monitor& m : monitors) total *= static_cast<std::size_t>(m.size());
  return total;
}

std::size_t Tba::reachable_locations() const {
  // Region abstraction of the single clock: guard truth is constant at each
  // interval endpoint and on each open gap between consecutive endpoints, so
  // one representative stamp per region suffices.
  std::vector<Rat> constants{Rat(0)};
  for (const Monitor& m : monitors)
    for (const auto& loc_edges : m.edges)
      for (const TbaEdge& e : loc_edges) {
        if (e.clock_lo) constants.push_back(*e.clock_lo);
        if (e.clock_hi) constants.push_back(*e.clock_hi);
      }
  std::sort(constants.begin(), constants.end());
  constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
  std::vector<Rat> samples;
  for (std::size_t i = 0; i < constants.size(); ++i) {
    samples.push_back(constants[i]);
    if (i + 1 < constants.size())
      samples.push_back((constants[i] + constants[i + 1]) / Rat(2));
  }
  samples.push_back(constants.back() + Rat(1));

  std::vector<std::set<std::string>> letters;
  const std::vector<std::string> atom_list(atoms.begin(), atoms.end());
  const std::size_t n_letters = std::size_t(1) << atom_list.size();
  for (std::size_t mask = 0; mask < n_letters; ++mask) {
    std::set<std::string> letter;
    for (std::size_t b = 0; b < atom_list.size(); ++b)
      if (mask & (std::size_t(1) << b)) letter.insert(atom_list[b]);
    letters.push_back(std::move(letter));
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;  // (location tuple, stamp region)
  std::set<std::size_t> reached;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  const std::size_t init = encode(initial_locs());
  // A word's first stamp is 0 (region 0); later stamps are nondecreasing.
  stack.push_back({init, 0});
  seen.insert(stack.back());
  reached.insert(init);
  while (!stack.empty()) {
    const auto [loc_idx, si] = stack.back();
    stack.pop_back();
    const std::vector<int> locs = decode(loc_idx);
    for (std::size_t sj = si; sj < samples.size(); ++sj) {
      for (const auto& letter : letters) {
        const std::size_t nxt = encode(step(locs, letter, samples[sj]));
        reached.insert(nxt);
        if (seen.insert({nxt, sj}).second) stack.push_back({nxt, sj});
      }
    }
  }
  return reached.size();
}

std::string to_dot(const Tba& tba) {
  std::string out = "digraph tba {\n  rankdir=LR;\n";
  for (std::size_t m = 0; m < tba.monitors.size(); ++m) {
    const Monitor& mon = tba.monitors[m];
    const std::string mi = std::to_string(m);
    out += "  subgraph cluster_" + mi + " {\n";
    out += "    label=\"" + tba.conjuncts[m].str() + "\";\n";
    for (int l = 0; l < mon.size(); ++l) {
      const std::string shape = mon.accepting.count(l) ? "doublecircle" : "circle";
      out += "    m" + mi + "_" + std::to_string(l) + " [label=\"" +
             mon.loc_names[static_cast<std::size_t>(l)] + "\", shape=" + shape + "];\n";
    }
    for (int l = 0; l < mon.size(); ++l) {
      for (const TbaEdge& e : mon.edges[static_cast<std::size_t>(l)]) {
        std::string guard;
        for (const Lit& lit : e.guard) guard += (guard.empty() ? "" : " & ") + lit.str();
        if (e.clock_lo) guard += (guard.empty() ? "" : " & ") + ("x>=" + rat_to_string(*e.clock_lo));
        if (e.clock_hi) guard += (guard.empty() ? "" : " & ") + ("x<=" + rat_to_string(*e.clock_hi));
        if (guard.empty()) guard = "true";
        out += "    m" + mi + "_" + std::to_string(l) + " -> m" + mi + "_" +
               std::to_string(e.target) + " [label=\"" + guard + "\"];\n";
      }
    }
    out += "  }\n";
  }
  out += "}\n";
  return out;
}

bool accepts(const Tba& tba, const TimedWord& word) {
  Rat prev(0);
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i].stamp < Rat(0))
      throw std::invalid_argument("timed word stamps must be nonnegative");
    if (i > 0 && word[i].stamp < prev)
      throw std::invalid_argument("timed word stamps must be nondecreasing");
    prev = word[i].stamp;
  }
  std::vector<int> locs = tba.initial_locs();
  for (const TimedLetter& tl : word) {
    locs = tba.step(locs, tl.letter, tl.stamp);
    if (tba.is_rejecting(locs)) return false;
  }
  if (!word.empty()) locs = tba.step(locs, word.back().letter, tba.suffix_stamp());
  return tba.is_accepting(locs);
}

bool brute_force_satisfies(const std::vector<Conjunct>& conjuncts, const TimedWord& word) {
  for (const Conjunct& c : conjuncts) {
    bool ok = false;
    switch (c.kind) {
      case ConjunctKind::Always:
        ok = std::all_of(word.begin(), word.end(),
                         [&](const TimedLetter& tl) { return c.lit.satisfied_by(tl.letter); });
        break;
      case ConjunctKind::Eventually:
        ok = std::any_of(word.begin(), word.end(), [&](const TimedLetter& tl) {
          return c.interval.contains(tl.stamp) && c.lit.satisfied_by(tl.letter);
        });
        break;
      case ConjunctKind::Until: {
        bool prefix_ok = true;
        for (const TimedLetter& tl : word) {
          if (prefix_ok && c.interval.contains(tl.stamp) && c.lit.satisfied_by(tl.letter)) {
            ok = true;
            break;
          }
          prefix_ok = prefix_ok && c.lit_left.satisfied_by(tl.letter);
          if (!prefix_ok && tl.stamp > *c.interval.hi) break;
        }
        break;
      }
      case ConjunctKind::Next:
        ok = word.size() >= 2 && c.interval.contains(word[1].stamp) &&
             c.lit.satisfied_by(word[1].letter);
        break;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace tubenav

#include "tubenav/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace tubenav {

namespace {

std::int64_t parse_int(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer in rational literal");
  std::size_t pos = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer in rational literal: '" + s + "'");
  }
  if (pos != s.size())
    throw std::invalid_argument("trailing characters in rational literal: '" + s + "'");
  return value;
}

std::int64_t pow10_checked(std::size_t digits) {
  std::int64_t p = 1;
  for (std::size_t i = 0; i < digits; ++i) {
    if (p > 900'000'000'000'000'000 / 10)
      throw std::invalid_argument("decimal literal has too many fractional digits");
    p *= 10;
  }
  return p;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    const std::int64_t num = parse_int(s.substr(0, slash));
    const std::int64_t den = parse_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    return Rat(num, den);
  }

  if (auto dot = s.find('.'); dot != std::string::npos) {
    bool negative = !s.empty() && s[0] == '-';
    std::string head = s.substr(0, dot);
    if (head.empty() || head == "-" || head == "+") head += "0";
    std::string frac = s.substr(dot + 1);
    if (frac.empty()) throw std::invalid_argument("bad decimal literal: '" + text + "'");
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("bad decimal literal: '" + text + "'");
    const std::int64_t whole = parse_int(head);
    const std::int64_t scale = pow10_checked(frac.size());
    const std::int64_t frac_value = frac.size() ? parse_int(frac) : 0;
    Rat r(whole, 1);
    Rat f(frac_value, scale);
    return negative ? r - f : r + f;
  }

  return Rat(parse_int(s), 1);
}

std::string rat_to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace tubenav

#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <string>

namespace tubenav {

// Exact rational time arithmetic. Transition durations, sampling periods and
// formula interval bounds are all rationals so that time-stamp comparisons in
// the timed automata are exact (no float comparison anywhere in guards).
using Rat = boost::rational<std::int64_t>;

// Parses "p/q", plain integers ("12") and decimal literals ("5.2", "-0.25")
// into an exact rational. Throws std::invalid_argument on anything else
// (including overflow of the int64 numerator/denominator).
Rat rat_from_string(const std::string& text);

// Canonical text form: integers render bare ("12"), everything else as "p/q".
std::string rat_to_string(const Rat& r);

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace tubenav

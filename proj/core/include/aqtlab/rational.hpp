#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Boost 1.74's mixed rational/integer operator== recurses forever under C++20
// rewritten comparisons. Exact non-template overloads win overload resolution
// and sidestep it; != and the reversed forms are synthesized from these.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == static_cast<std::int64_t>(b); }
inline bool operator==(const rational<std::int64_t>& a, long long b) { return a == static_cast<std::int64_t>(b); }
}  // namespace boost

namespace aqtlab {

/// Exact rational used for every rate, burst, size and bound in the library.
using Rational = boost::rational<std::int64_t>;

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::int64_t floor(const Rational& q);
std::int64_t ceil(const Rational& q);

/// Parses "p", "p/q" or "-p/q". Throws ValidationError on malformed text or q == 0.
Rational parse_rational(std::string_view text);

/// Formats as "p" when the denominator is 1, "p/q" otherwise.
std::string to_string(const Rational& q);

/// Least common multiple of two positive denominators; throws on overflow.
std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

}  // namespace aqtlab

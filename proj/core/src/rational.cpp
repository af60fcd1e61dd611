#include "aqtlab/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

namespace aqtlab {

std::int64_t floor(const Rational& q) {
  const auto n = q.numerator();
  const auto d = q.denominator();  // always positive after normalization
  auto r = n / d;
  if (n % d != 0 && n < 0) --r;
  return r;
}

std::int64_t ceil(const Rational& q) { return -floor(-q); }

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  if (text.empty()) throw ValidationError("malformed rational '" + std::string(whole) + "'");
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  const auto num = parse_int(text.substr(0, slash), text);
  const auto den = parse_int(text.substr(slash + 1), text);
  if (den == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  const auto g = std::gcd(a, b);
  const auto step = a / g;
  if (step != 0 && b > std::numeric_limits<std::int64_t>::max() / step) {
    throw ValidationError("denominator overflow while scaling rationals");
  }
  return step * b;
}

}  // namespace aqtlab

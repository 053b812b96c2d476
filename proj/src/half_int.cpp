#include "rotframe/half_int.hpp"

#include <charconv>
#include <stdexcept>

namespace rotframe {

std::string HalfInt::to_string() const {
  if (is_integer()) return std::to_string(as_integer());
  return std::to_string(twice_) + "/2";
}

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const char *end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty())
    throw std::invalid_argument("not a half-integer: '" + std::string(whole) + "'");
  return v;
}

} // namespace

HalfInt parse_half_int(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty half-integer");
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(s.substr(0, slash), text);
    const auto den = parse_int(s.substr(slash + 1), text);
    if (den == 1) return HalfInt::from_twice(2 * num);
    if (den != 2) throw std::invalid_argument("denominator must be 1 or 2: '" + std::string(text) + "'");
    return HalfInt::from_twice(num);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto frac = s.substr(dot + 1);
    const bool negative = !s.empty() && s.front() == '-';
    auto whole = s.substr(0, dot);
    std::int64_t w = 0;
    if (whole == "-" || whole.empty()) w = 0;
    else w = parse_int(whole, text);
    std::int64_t twice = 2 * (w < 0 ? -w : w);
    if (frac == "5") twice += 1;
    else if (!(frac.empty() || frac.find_first_not_of('0') == std::string_view::npos))
      throw std::invalid_argument("not a half-integer: '" + std::string(text) + "'");
    return HalfInt::from_twice(negative ? -twice : twice);
  }
  return HalfInt::from_twice(2 * parse_int(s, text));
}

} // namespace rotframe

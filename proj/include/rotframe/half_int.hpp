#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace rotframe {

/// Exact half-integer stored as twice its value. Used for every angular
/// momentum l and magnetic number m in the library.
class HalfInt {
public:
  constexpr HalfInt() = default;
  constexpr HalfInt(int value) : twice_(2 * static_cast<std::int64_t>(value)) {}

  static constexpr HalfInt from_twice(std::int64_t twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static constexpr HalfInt half() { return from_twice(1); }

  constexpr std::int64_t twice() const { return twice_; }
  constexpr double value() const { return 0.5 * static_cast<double>(twice_); }
  constexpr long double value_ld() const { return 0.5L * static_cast<long double>(twice_); }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  /// Integer value; only meaningful when is_integer().
  constexpr std::int64_t as_integer() const { return twice_ / 2; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt &operator+=(HalfInt o) { twice_ += o.twice_; return *this; }
  constexpr HalfInt &operator-=(HalfInt o) { twice_ -= o.twice_; return *this; }
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return a += b; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return a -= b; }

  friend constexpr bool operator==(HalfInt, HalfInt) = default;
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  std::string to_string() const;

private:
  std::int64_t twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }
constexpr HalfInt min(HalfInt a, HalfInt b) { return a < b ? a : b; }
constexpr HalfInt max(HalfInt a, HalfInt b) { return a < b ? b : a; }

/// True when a - b is an integer (the l/m pairing rule).
constexpr bool same_parity(HalfInt a, HalfInt b) { return (a - b).is_integer(); }

/// Parses "3", "-2", "1/2", "-3/2", "2.5". Throws std::invalid_argument.
HalfInt parse_half_int(std::string_view text);

namespace literals {
/// 3_h2 == 3/2
constexpr HalfInt operator""_h2(unsigned long long twice) {
  return HalfInt::from_twice(static_cast<std::int64_t>(twice));
}
} // namespace literals

} // namespace rotframe

template <> struct std::hash<rotframe::HalfInt> {
  std::size_t operator()(rotframe::HalfInt h) const noexcept {
    return std::hash<std::int64_t>{}(h.twice());
  }
};

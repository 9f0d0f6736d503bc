#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ergolab {

using int128 = __int128;
using uint128 = unsigned __int128;
using Int256 = boost::multiprecision::checked_int256_t;
using BigInt = boost::multiprecision::cpp_int;

/// Signed fixed-point real with 64 fractional bits, stored in a 128-bit word.
///
/// The representable range is [-2^63, 2^63) with quantization unit 2^-64.
/// Addition, subtraction and multiplication by integers are exact and throw
/// HeadroomError instead of wrapping.
class FixedReal {
 public:
  static constexpr int kFracBits = 64;

  constexpr FixedReal() = default;

  static constexpr FixedReal from_raw(int128 raw) {
    FixedReal r;
    r.raw_ = raw;
    return r;
  }
  static FixedReal from_int(std::int64_t v) { return from_raw(static_cast<int128>(v) << kFracBits); }
  // Nearest representable value (ties away from zero).
  static FixedReal from_double(double v);
  static FixedReal from_ratio(std::int64_t num, std::int64_t den);
  // Value in [0,1) with the given 64 fractional bits.
  static constexpr FixedReal from_fraction_bits(std::uint64_t bits) { return from_raw(static_cast<int128>(bits)); }

  constexpr int128 raw() const { return raw_; }

  // ⌊x⌋; exact.
  std::int64_t floor() const { return static_cast<std::int64_t>(raw_ >> kFracBits); }
  // x − ⌊x⌋ ∈ [0,1); exact.
  FixedReal frac() const { return from_fraction_bits(frac_bits()); }
  std::uint64_t frac_bits() const { return static_cast<std::uint64_t>(static_cast<uint128>(raw_)); }

  bool is_integer() const { return frac_bits() == 0; }
  bool is_zero() const { return raw_ == 0; }

  double to_double() const;
  long double to_long_double() const;

  FixedReal operator-() const;
  FixedReal& operator+=(FixedReal o);
  FixedReal& operator-=(FixedReal o);
  friend FixedReal operator+(FixedReal a, FixedReal b) { return a += b; }
  friend FixedReal operator-(FixedReal a, FixedReal b) { return a -= b; }
  // Exact integer multiple.
  FixedReal times(std::int64_t k) const;
  // Product rounded to nearest multiple of 2^-64.
  FixedReal mul_round(FixedReal o) const;
  FixedReal abs() const { return raw_ < 0 ? -*this : *this; }

  friend constexpr bool operator==(FixedReal a, FixedReal b) { return a.raw_ == b.raw_; }
  friend constexpr std::strong_ordering operator<=>(FixedReal a, FixedReal b) {
    return a.raw_ < b.raw_ ? std::strong_ordering::less
                           : (a.raw_ > b.raw_ ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  // "0x<hi>.<lo>" two's-complement bit pattern, used in reports.
  std::string to_hex() const;
  std::string to_string(int digits = 20) const;

 private:
  int128 raw_ = 0;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  bool is_integer() const { return den == 1; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// A parsed real literal: its quantized value and, when the literal names a
/// rational number with a modest denominator, the exact rational.
struct RealLiteral {
  FixedReal value;
  std::optional<Rational> exact;
};

// Largest denominator kept exact when parsing decimals and fractions.
inline constexpr std::int64_t kMaxExactDenominator = std::int64_t{1} << 40;

/// Parse "[-]atom[/den]" where atom is a decimal ("1.25", "3", "1e-3" is not
/// accepted) or a named constant: sqrt2, sqrt3, sqrt5, sqrt6, phi, e, pi.
/// Named constants resolve to the nearest 64-fractional-bit value.
RealLiteral parse_real(std::string_view text);

// Nearest fixed-point value to the rational num/den (ties away from zero).
FixedReal round_rational(const BigInt& num, const BigInt& den);

std::string to_string(int128 v);

Int256 to_int256(int128 v);
// Throws HeadroomError if v does not fit.
int128 to_int128(const Int256& v);
// ⌊a / 2^bits⌋ for bits < 256.
Int256 floor_shift(const Int256& a, unsigned bits);

}  // namespace ergolab

#include "ergolab/fixed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

constexpr int128 kInt128Max = static_cast<int128>(~static_cast<uint128>(0) >> 1);

struct NamedConstant {
  std::string_view name;
  std::string_view digits;
};

// 50 significant decimals; rounding to 2^-64 needs about 20.
constexpr NamedConstant kConstants[] = {
    {"sqrt2", "1.41421356237309504880168872420969807856967187537694"},
    {"sqrt3", "1.73205080756887729352744634150587236694280525381038"},
    {"sqrt5", "2.23606797749978969640917366873127623544061835961152"},
    {"sqrt6", "2.44948974278317809819728407470589139196594748065667"},
    {"phi", "1.61803398874989484820458683436563811772030917980576"},
    {"e", "2.71828182845904523536028747135266249775724709369995"},
    {"pi", "3.14159265358979323846264338327950288419716939937510"},
};

int128 big_to_int128(const BigInt& v) {
  BigInt mag = abs(v);
  if (msb(mag + 1) >= 127) throw HeadroomError("value exceeds 128-bit fixed-point range");
  const auto lo = static_cast<std::uint64_t>(mag & BigInt(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  int128 r = static_cast<int128>((static_cast<uint128>(hi) << 64) | lo);
  return v < 0 ? -r : r;
}

// Parses an unsigned decimal "123.456" into numerator / 10^scale.
bool parse_decimal(std::string_view s, BigInt& num, BigInt& den) {
  if (s.empty()) return false;
  num = 0;
  den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return false;
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
  }
  return seen_digit;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

FixedReal FixedReal::from_double(double v) {
  if (!std::isfinite(v) || std::fabs(v) >= 9.2233720368547758e18) {
    throw HeadroomError("double outside fixed-point range");
  }
  // long double carries a 64-bit mantissa on x86-64, so the scaling is exact.
  const long double scaled = std::ldexp(static_cast<long double>(v), kFracBits);
  return from_raw(static_cast<int128>(std::round(scaled)));
}

FixedReal FixedReal::from_ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidInput("zero denominator");
  return round_rational(BigInt(num), BigInt(den));
}

double FixedReal::to_double() const { return static_cast<double>(to_long_double()); }

long double FixedReal::to_long_double() const {
  return std::ldexp(static_cast<long double>(raw_), -kFracBits);
}

FixedReal FixedReal::operator-() const {
  if (raw_ == -kInt128Max - 1) throw HeadroomError("fixed-point negation overflow");
  return from_raw(-raw_);
}

FixedReal& FixedReal::operator+=(FixedReal o) {
  if (__builtin_add_overflow(raw_, o.raw_, &raw_)) throw HeadroomError("fixed-point addition overflow");
  return *this;
}

FixedReal& FixedReal::operator-=(FixedReal o) {
  if (__builtin_sub_overflow(raw_, o.raw_, &raw_)) throw HeadroomError("fixed-point subtraction overflow");
  return *this;
}

FixedReal FixedReal::times(std::int64_t k) const {
  int128 out;
  if (__builtin_mul_overflow(raw_, static_cast<int128>(k), &out)) {
    throw HeadroomError("fixed-point integer multiple overflow");
  }
  return from_raw(out);
}

FixedReal FixedReal::mul_round(FixedReal o) const {
  const BigInt prod = BigInt(to_string(raw_)) * BigInt(to_string(o.raw_));
  return round_rational(prod, BigInt(1) << (2 * kFracBits));
}

std::string FixedReal::to_hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  const auto bits = static_cast<uint128>(raw_);
  std::string out = "0x";
  for (int shift = 124; shift >= 0; shift -= 4) {
    if (shift == 60) out += '.';
    out += kHex[static_cast<int>((bits >> shift) & 0xF)];
  }
  return out;
}

std::string FixedReal::to_string(int digits) const {
  std::string out;
  FixedReal v = *this;
  if (raw_ < 0) {
    out += '-';
    v = -v;
  }
  out += ergolab::to_string(static_cast<int128>(v.floor()));
  std::uint64_t frac = v.frac_bits();
  if (digits > 0) {
    out += '.';
    for (int i = 0; i < digits; ++i) {
      const uint128 t = static_cast<uint128>(frac) * 10;
      out += static_cast<char>('0' + static_cast<int>(t >> 64));
      frac = static_cast<std::uint64_t>(t);
    }
  }
  return out;
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidInput("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return Rational{num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

FixedReal round_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidInput("zero denominator");
  BigInt n = num;
  BigInt d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const BigInt scaled = abs(n) << FixedReal::kFracBits;
  BigInt q = (2 * scaled + d) / (2 * d);
  if (n < 0) q = -q;
  return FixedReal::from_raw(big_to_int128(q));
}

RealLiteral parse_real(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw InvalidInput("empty real literal");
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
    s = trim(s);
  }
  BigInt extra_den = 1;
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt dnum, dden;
    if (!parse_decimal(trim(s.substr(slash + 1)), dnum, dden) || dden != 1 || dnum == 0) {
      throw InvalidInput("bad denominator in real literal '" + std::string(text) + "'");
    }
    extra_den = dnum;
    s = trim(s.substr(0, slash));
  }

  for (const auto& c : kConstants) {
    if (s == c.name) {
      BigInt num, den;
      parse_decimal(c.digits, num, den);
      if (negative) num = -num;
      return RealLiteral{round_rational(num, den * extra_den), std::nullopt};
    }
  }

  BigInt num, den;
  if (!parse_decimal(s, num, den)) {
    throw InvalidInput("unrecognized real literal '" + std::string(text) + "'");
  }
  den *= extra_den;
  const BigInt g = gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (negative) num = -num;
  RealLiteral lit{round_rational(num, den), std::nullopt};
  if (den <= kMaxExactDenominator && abs(num) <= BigInt(std::numeric_limits<std::int64_t>::max())) {
    lit.exact = Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
  }
  return lit;
}

std::string to_string(int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  uint128 mag = neg ? static_cast<uint128>(-(v + 1)) + 1 : static_cast<uint128>(v);
  std::string out;
  while (mag > 0) {
    out += static_cast<char>('0' + static_cast<int>(mag % 10));
    mag /= 10;
  }
  if (neg) out += '-';
  std::reverse(out.begin(), out.end());
  return out;
}

Int256 to_int256(int128 v) {
  const uint128 mag = v < 0 ? static_cast<uint128>(-(v + 1)) + 1 : static_cast<uint128>(v);
  Int256 r = Int256(static_cast<std::uint64_t>(mag >> 64));
  r <<= 64;
  r += static_cast<std::uint64_t>(mag);
  return v < 0 ? Int256(-r) : r;
}

int128 to_int128(const Int256& v) {
  const Int256 mag = abs(v);
  if (msb(mag + 1) >= 127) throw HeadroomError("value does not fit in 128 bits");
  const auto lo = static_cast<std::uint64_t>(mag & Int256(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  const int128 r = static_cast<int128>((static_cast<uint128>(hi) << 64) | lo);
  return v < 0 ? -r : r;
}

Int256 floor_shift(const Int256& a, unsigned bits) {
  const Int256 d = Int256(1) << bits;
  Int256 q = a / d;
  if (a % d != 0 && a < 0) --q;
  return q;
}

}  // namespace ergolab

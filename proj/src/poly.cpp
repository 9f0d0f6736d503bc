#include "ergolab/poly.hpp"

#include <numeric>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

constexpr int kAccumulatorBits = 254;

int bit_length(uint128 v) {
  int bits = 0;
  while (v) {
    ++bits;
    v >>= 1;
  }
  return bits;
}

int bit_length(const Int256& v) {
  if (v == 0) return 0;
  return static_cast<int>(msb(abs(v))) + 1;
}

uint128 magnitude(int128 v) { return v < 0 ? static_cast<uint128>(-(v + 1)) + 1 : static_cast<uint128>(v); }

int128 int256_to_int128(const Int256& v) {
  const Int256 mag = abs(v);
  const auto lo = static_cast<std::uint64_t>(mag & Int256(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  const int128 r = static_cast<int128>((static_cast<uint128>(hi) << 64) | lo);
  return v < 0 ? -r : r;
}

int128 floor_div(int128 a, int128 b) {
  int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int256 floor_div(const Int256& a, const Int256& b) {
  Int256 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

BigInt to_big(int128 v) { return BigInt(ergolab::to_string(v)); }

}  // namespace

Coefficient Coefficient::rational(std::int64_t num, std::int64_t den) {
  const Rational r = Rational::make(num, den);
  return {FixedReal::from_ratio(r.num, r.den), r};
}

Coefficient Coefficient::parse(const std::string& text) {
  const RealLiteral lit = parse_real(text);
  return {lit.value, lit.exact};
}

RealPolynomial::RealPolynomial(std::vector<Coefficient> coefficients, int max_degree) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  if (degree() > max_degree) {
    throw InvalidInput("polynomial degree " + std::to_string(degree()) + " exceeds maximum " +
                       std::to_string(max_degree));
  }
  prepare();
}

RealPolynomial RealPolynomial::from_fixed(const std::vector<FixedReal>& coefficients) {
  std::vector<Coefficient> c;
  c.reserve(coefficients.size());
  for (auto v : coefficients) c.push_back(Coefficient::fixed(v));
  return RealPolynomial(std::move(c));
}

RealPolynomial RealPolynomial::from_integers(const std::vector<std::int64_t>& coefficients) {
  std::vector<Coefficient> c;
  c.reserve(coefficients.size());
  for (auto v : coefficients) c.push_back(Coefficient::integer(v));
  return RealPolynomial(std::move(c));
}

RealPolynomial RealPolynomial::monomial(Coefficient c, int degree) {
  std::vector<Coefficient> cs(static_cast<std::size_t>(degree) + 1, Coefficient::integer(0));
  cs.back() = c;
  return RealPolynomial(std::move(cs));
}

RealPolynomial RealPolynomial::parse(const std::vector<std::string>& coefficients) {
  std::vector<Coefficient> c;
  c.reserve(coefficients.size());
  for (const auto& s : coefficients) c.push_back(Coefficient::parse(s));
  return RealPolynomial(std::move(c));
}

Coefficient RealPolynomial::coefficient(int i) const {
  if (i < 0 || i > degree()) return Coefficient::integer(0);
  return coeffs_[static_cast<std::size_t>(i)];
}

void RealPolynomial::prepare() {
  // Common denominator of the exact coefficients, capped; beyond the cap a
  // coefficient falls back to its quantized value.
  denom_ = 1;
  std::vector<bool> use_exact(coeffs_.size(), false);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!coeffs_[i].exact) continue;
    const std::int64_t den = coeffs_[i].exact->den;
    const std::int64_t l = std::lcm(denom_, den);
    if (l <= kMaxExactDenominator) {
      denom_ = l;
      use_exact[i] = true;
    }
  }
  scaled_.clear();
  scaled128_.clear();
  fits128_ = true;
  coeff_bits_ = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    Int256 s;
    if (use_exact[i]) {
      s = Int256(coeffs_[i].exact->num) * Int256(denom_ / coeffs_[i].exact->den);
      s *= Int256(1) << FixedReal::kFracBits;
    } else {
      s = to_int256(coeffs_[i].value.raw()) * Int256(denom_);
    }
    coeff_bits_ = std::max(coeff_bits_, bit_length(s));
    scaled_.push_back(s);
    if (bit_length(s) <= 126) {
      scaled128_.push_back(int256_to_int128(s));
    } else {
      fits128_ = false;
      scaled128_.push_back(0);
    }
  }
}

bool RealPolynomial::has_integer_coefficients() const {
  for (const auto& c : coeffs_) {
    if (c.exact ? !c.exact->is_integer() : !c.value.is_integer()) return false;
  }
  return true;
}

bool RealPolynomial::nonconstant_rational() const {
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    if (!coeffs_[i].exact) return false;
  }
  return true;
}

std::optional<std::int64_t> RealPolynomial::fractional_period() const {
  if (!nonconstant_rational()) return std::nullopt;
  std::int64_t q = 1;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) q = std::lcm(q, coeffs_[i].exact->den);
  return q;
}

void RealPolynomial::check_headroom(std::int64_t max_abs_n) const {
  if (coeffs_.empty()) return;
  const int nbits = bit_length(magnitude(static_cast<int128>(max_abs_n)));
  const int need = coeff_bits_ + degree() * nbits + bit_length(static_cast<uint128>(degree() + 1));
  if (need > kAccumulatorBits) {
    throw HeadroomError("polynomial of degree " + std::to_string(degree()) + " with |n| up to " +
                        std::to_string(max_abs_n) + " needs " + std::to_string(need) +
                        " accumulator bits (limit " + std::to_string(kAccumulatorBits) + ")");
  }
}

struct PolyEvaluator {
  static FloorFrac eval(const RealPolynomial& p, std::int64_t n) {
    if (p.coeffs_.empty()) return {};
    if (p.fits128_) {
      int128 acc = p.scaled128_.back();
      bool ok = true;
      for (int i = p.degree() - 1; i >= 0 && ok; --i) {
        ok = !__builtin_mul_overflow(acc, static_cast<int128>(n), &acc) &&
             !__builtin_add_overflow(acc, p.scaled128_[static_cast<std::size_t>(i)], &acc);
      }
      if (ok) {
        const int128 q = p.denom_ == 1 ? acc : floor_div(acc, static_cast<int128>(p.denom_));
        return {static_cast<std::int64_t>(q >> 64), FixedReal::from_fraction_bits(static_cast<std::uint64_t>(q))};
      }
    }
    try {
      p.check_headroom(n < 0 ? -n : n);
      Int256 acc = p.scaled_.back();
      for (int i = p.degree() - 1; i >= 0; --i) acc = acc * n + p.scaled_[static_cast<std::size_t>(i)];
      const Int256 q = floor_div(acc, Int256(p.denom_));
      const Int256 fl = floor_div(q, Int256(1) << 64);
      const Int256 fr = q - fl * (Int256(1) << 64);
      if (fl > Int256(std::numeric_limits<std::int64_t>::max()) ||
          fl < Int256(std::numeric_limits<std::int64_t>::min())) {
        throw HeadroomError("⌊p(n)⌋ does not fit in 64 bits at n = " + std::to_string(n));
      }
      return {static_cast<std::int64_t>(fl), FixedReal::from_fraction_bits(static_cast<std::uint64_t>(fr))};
    } catch (const std::overflow_error&) {
      throw HeadroomError("256-bit accumulator overflow at n = " + std::to_string(n));
    }
  }
};

FloorFrac eval_floor_frac(const RealPolynomial& p, std::int64_t n) { return PolyEvaluator::eval(p, n); }
std::int64_t eval_floor(const RealPolynomial& p, std::int64_t n) { return PolyEvaluator::eval(p, n).floor; }
FixedReal eval_frac(const RealPolynomial& p, std::int64_t n) { return PolyEvaluator::eval(p, n).frac; }

RealPolynomial RealPolynomial::shifted(std::int64_t h) const {
  const int d = degree();
  std::vector<Coefficient> out;
  for (int j = 0; j <= d; ++j) {
    bool all_exact = true;
    for (int i = j; i <= d; ++i) all_exact = all_exact && coeffs_[static_cast<std::size_t>(i)].exact.has_value();
    // C(i,j) h^{i-j}
    auto weight = [&](int i) {
      BigInt binom = 1;
      for (int t = 0; t < j; ++t) binom = binom * (i - t) / (t + 1);
      BigInt hp = 1;
      for (int t = 0; t < i - j; ++t) hp *= h;
      return binom * hp;
    };
    if (all_exact) {
      BigInt num = 0, den = 1;
      for (int i = j; i <= d; ++i) {
        const Rational& r = *coeffs_[static_cast<std::size_t>(i)].exact;
        num = num * r.den + weight(i) * r.num * den;
        den *= r.den;
        const BigInt g = gcd(num, den);
        if (g > 1) {
          num /= g;
          den /= g;
        }
      }
      Coefficient c{round_rational(num, den), std::nullopt};
      if (den <= kMaxExactDenominator && abs(num) <= BigInt(std::numeric_limits<std::int64_t>::max())) {
        c.exact = Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
      }
      out.push_back(c);
    } else {
      BigInt raw = 0;
      for (int i = j; i <= d; ++i) raw += weight(i) * to_big(coeffs_[static_cast<std::size_t>(i)].value.raw());
      out.push_back(Coefficient::fixed(round_rational(raw, BigInt(1) << 64)));
    }
  }
  return RealPolynomial(std::move(out));
}

std::string RealPolynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const auto& c = coeffs_[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (c.exact) {
      os << c.exact->num;
      if (c.exact->den != 1) os << '/' << c.exact->den;
    } else {
      os << c.value.to_string(12);
    }
    if (i >= 1) os << "*t";
    if (i >= 2) os << '^' << i;
  }
  return os.str();
}

FracDensityReport frac_density(const RealPolynomial& p, FixedReal delta, Window window) {
  if (!(delta > FixedReal{} && delta < FixedReal::from_int(1))) throw InvalidInput("delta must lie in (0,1)");
  if (window.length() < 1) throw InvalidInput("density window must be non-empty");
  p.check_headroom(std::max(window.begin < 0 ? -window.begin : window.begin, window.end));

  // {p(n)} ≥ 1 − δ  ⇔  frac bits ≥ 2^64 − δ·2^64 (δ is a multiple of 2^-64).
  const std::uint64_t threshold = static_cast<std::uint64_t>(-static_cast<std::int64_t>(delta.frac_bits()));
  auto hit = [&](std::int64_t n) { return eval_frac(p, n).frac_bits() >= threshold; };

  FracDensityReport r;
  r.delta = delta;
  r.window = window;
  for (std::int64_t n = window.begin; n < window.end; ++n) r.count += hit(n) ? 1 : 0;
  r.density = static_cast<double>(r.count) / static_cast<double>(window.length());

  if (const auto q = p.fractional_period(); q && *q <= 100'000'000) {
    r.periodic = true;
    r.period = *q;
    for (std::int64_t n = window.begin; n < window.begin + *q; ++n) r.period_count += hit(n) ? 1 : 0;
    r.period_density = static_cast<double>(r.period_count) / static_cast<double>(*q);
  }
  return r;
}

double frac_upper_density(const RealPolynomial& p, FixedReal delta, Window window) {
  const std::int64_t len = window.length();
  double best = 0.0;
  for (std::int64_t shift : {std::int64_t{0}, len / 2, len, 2 * len}) {
    best = std::max(best, frac_density(p, delta, {window.begin + shift, window.end + shift}).density);
  }
  return best;
}

}  // namespace ergolab

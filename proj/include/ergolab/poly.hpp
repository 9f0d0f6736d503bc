#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/fixed.hpp"

namespace ergolab {

/// One polynomial coefficient: its quantized value plus the exact rational
/// it was declared as, when there is one.
struct Coefficient {
  FixedReal value;
  std::optional<Rational> exact;

  static Coefficient fixed(FixedReal v) { return {v, std::nullopt}; }
  static Coefficient integer(std::int64_t v) { return {FixedReal::from_int(v), Rational{v, 1}}; }
  static Coefficient rational(std::int64_t num, std::int64_t den);
  static Coefficient parse(const std::string& text);

  bool is_zero() const { return exact ? exact->num == 0 : value.is_zero(); }
  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

/// Real polynomial p(t) = Σ a_i t^i with exact floor / fractional-part evaluation.
///
/// Rational coefficients are evaluated exactly over their common denominator;
/// the others use their 2^-64 quantization. Accumulation runs in 128-bit
/// integers and falls back to checked 256-bit integers, so results are exact
/// or an error, never silently wrong.
class RealPolynomial {
 public:
  static constexpr int kDefaultMaxDegree = 8;

  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<Coefficient> coefficients, int max_degree = kDefaultMaxDegree);

  static RealPolynomial from_fixed(const std::vector<FixedReal>& coefficients);
  static RealPolynomial from_integers(const std::vector<std::int64_t>& coefficients);
  static RealPolynomial monomial(Coefficient c, int degree);
  static RealPolynomial parse(const std::vector<std::string>& coefficients);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Coefficient>& coefficients() const { return coeffs_; }
  Coefficient coefficient(int i) const;

  bool has_integer_coefficients() const;
  // True when every coefficient of degree ≥ 1 is an exact rational.
  bool nonconstant_rational() const;
  // Period of n ↦ {p(n)} when nonconstant_rational(): lcm of those denominators.
  std::optional<std::int64_t> fractional_period() const;

  // Throws HeadroomError if some |n| ≤ max_abs_n could overflow the 256-bit accumulator.
  void check_headroom(std::int64_t max_abs_n) const;

  // p(t + h); exact for integer h.
  RealPolynomial shifted(std::int64_t h) const;

  std::string to_string() const;
  friend bool operator==(const RealPolynomial&, const RealPolynomial&) = default;

 private:
  friend struct PolyEvaluator;
  void prepare();

  std::vector<Coefficient> coeffs_;
  // Scaled integer coefficients over the common denominator denom_ · 2^64.
  std::vector<Int256> scaled_;
  std::vector<int128> scaled128_;
  bool fits128_ = true;
  std::int64_t denom_ = 1;
  int coeff_bits_ = 0;
};

struct FloorFrac {
  std::int64_t floor = 0;
  FixedReal frac;  // in [0,1), rounded down to 2^-64
};

// ⌊p(n)⌋ and {p(n)} computed exactly.
FloorFrac eval_floor_frac(const RealPolynomial& p, std::int64_t n);
std::int64_t eval_floor(const RealPolynomial& p, std::int64_t n);
FixedReal eval_frac(const RealPolynomial& p, std::int64_t n);

// Half-open integer interval [begin, end).
struct Window {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  std::int64_t length() const { return end - begin; }
  friend bool operator==(const Window&, const Window&) = default;
};

struct FracDensityReport {
  FixedReal delta;
  Window window;
  std::int64_t count = 0;
  double density = 0.0;  // count / |window|
  bool periodic = false;
  std::int64_t period = 0;          // set when periodic
  std::int64_t period_count = 0;    // hits over one period
  double period_density = 0.0;      // period_count / period
};

/// Proportion of n in the window with {p(n)} ∈ [1−δ, 1), by direct count.
FracDensityReport frac_density(const RealPolynomial& p, FixedReal delta, Window window);

/// Max of frac_density over the window shifted by 0, L/2, L, 2L (L its length).
/// A finite stand-in for the upper Banach density.
double frac_upper_density(const RealPolynomial& p, FixedReal delta, Window window);

}  // namespace ergolab

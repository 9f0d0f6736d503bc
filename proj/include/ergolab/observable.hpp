#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ergolab/systems.hpp"

namespace ergolab {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

// e(t) = exp(2πi t)
lcplx expi_turns(long double t);

/// Frequency vector: one residue per coordinate word (mod that word's modulus).
using Frequency = std::vector<std::uint64_t>;

struct FrequencyHash {
  std::size_t operator()(const Frequency& k) const noexcept;
};

using SpectrumMap = std::unordered_map<Frequency, lcplx, FrequencyHash>;

/// Bounded function on a StateSpace written as a finite character sum
/// f(x) = Σ c_t e(k_t·x). Characters, trigonometric polynomials, tensors and
/// arbitrary functions on finite spaces (via their Fourier transform) all fit.
class Observable {
 public:
  struct Term {
    lcplx coef;
    Frequency freq;
  };

  Observable() = default;

  static Observable constant(const StateSpace& space, cplx c);
  // e(k·x); entries of k are reduced mod the word moduli.
  static Observable character(const StateSpace& space, const std::vector<std::int64_t>& k);
  // χ_r(x) = e(r x / q) on ℤ_q.
  static Observable residue_character(std::uint64_t q, std::int64_t r);
  // Σ c_t e(k_t·x), rescaled so that Σ|c_t| ≤ 1 when it exceeds 1.
  static Observable trig_polynomial(const StateSpace& space,
                                    const std::vector<std::pair<cplx, std::vector<std::int64_t>>>& terms);
  // (f⊗g)(x,y) = f(x) g(y) on the product space.
  static Observable tensor(const Observable& f, const Observable& g);
  // Arbitrary function on a finite space, given by its values in point_at order.
  // Rescaled to sup-norm 1 if its largest value exceeds 1 in modulus.
  static Observable from_table(const StateSpace& space, const std::vector<cplx>& values);

  const StateSpace& space() const { return space_; }
  const std::vector<Term>& terms() const { return terms_; }
  double sup_bound() const { return sup_bound_; }
  // Factor applied by the normalization (1 when none was needed).
  double normalization() const { return normalization_; }
  const std::string& label() const { return label_; }
  Observable& set_label(std::string label) {
    label_ = std::move(label);
    return *this;
  }
  bool is_character() const { return terms_.size() == 1; }

  cplx operator()(const StatePoint& x) const { return eval(x.coords.data()); }
  cplx eval(const std::uint64_t* x) const;

  Observable conj() const;
  Observable operator*(const Observable& g) const;
  Observable scaled(cplx c) const;
  // f∘A for an affine transformation: terms pick up e(k·b), frequencies map to Aᵀk.
  Observable compose(const Transformation& t) const;
  // Coefficient of the zero frequency: ∫ f dμ, exact for the quantized space.
  cplx mean() const;

  SpectrumMap spectrum() const;

 private:
  void merge_terms();

  StateSpace space_;
  std::vector<Term> terms_;
  double sup_bound_ = 0.0;
  double normalization_ = 1.0;
  std::string label_;
};

// Phase e(k·b) and transformed frequency Aᵀk for one term under an affine map.
lcplx phase_of(const StateSpace& space, const Frequency& k, const StatePoint& x);
Frequency transpose_apply(const Transformation& t, const Frequency& k, long double* phase_turns);
bool is_zero_frequency(const Frequency& k);

// ∫ f_1 ⋯ f_r dμ by convolution of spectra.
cplx spectral_integral(const std::vector<Observable>& factors);

struct IntegralEstimate {
  cplx value;
  double std_error = 0.0;  // 0 for analytic and exact values
  std::size_t samples = 0;
  std::string method;      // "analytic", "exact", "sampled"
};

/// Integral of f against the system's invariant measure: analytic for a
/// single character, an exact sum on an enumerated finite space, otherwise a
/// sampled mean with its standard error.
IntegralEstimate integrate(const Observable& f, const CommutingSystem& system);

/// (1/N) Σ_{n=1}^{N} |∫ f·conj(Tⁿg) dμ − ∫f dμ · conj(∫g dμ)|, with exact spectral integrals.
double weak_mixing_defect(const Transformation& t, const Observable& f, const Observable& g, std::int64_t n);

/// Birkhoff average (1/N) Σ_{n<N} f(Tⁿx) at each sampler point of the system.
std::vector<cplx> ergodic_projection(const Observable& f, const Transformation& t, std::int64_t n,
                                     const std::vector<StatePoint>& points);

}  // namespace ergolab

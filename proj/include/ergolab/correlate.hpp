#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/observable.hpp"
#include "ergolab/poly.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// a(n) = ∫ f_0 · ∏_j (∏_i T_i^{[p_ij(n)]}) f_j dμ.
struct CorrelationSpec {
  CommutingSystem system;
  // iterates[i][j] = p_ij, an ℓ×m grid.
  std::vector<std::vector<RealPolynomial>> iterates;
  // f_0, f_1, ..., f_m
  std::vector<Observable> observables;

  std::size_t ell() const { return iterates.size(); }
  std::size_t m() const { return observables.empty() ? 0 : observables.size() - 1; }
  void validate() const;
  // ∏_i T_i^{[p_ij(n)]}
  Transformation iterate_map(std::size_t j, std::int64_t n) const;
  // Largest |[p_ij(n)]| is checked against polynomial headroom up to |n| ≤ max_abs_n.
  void check_headroom(std::int64_t max_abs_n) const;
};

enum class Route {
  Spectral,  // exact character calculus on the quantized system
  Sampler    // pointwise evaluation on the system's sampler points
};

struct SequenceSample {
  Window window;
  std::vector<cplx> values;
  std::string provenance;

  cplx at(std::int64_t n) const { return values.at(static_cast<std::size_t>(n - window.begin)); }
};

using SequenceFn = std::function<cplx(std::int64_t)>;

cplx correlation_at(const CorrelationSpec& spec, std::int64_t n, Route route = Route::Spectral);
// ∫ f_0 · ∏_j (∏_i T_i^{e_ij}) f_j dμ for an explicit ℓ×m exponent grid.
cplx correlation_for_exponents(const CorrelationSpec& spec, const std::vector<std::vector<std::int64_t>>& e,
                               Route route = Route::Spectral);
SequenceSample corr_seq(const CorrelationSpec& spec, Window window, Route route = Route::Spectral);
SequenceSample sample_sequence(const SequenceFn& a, Window window, std::string provenance = {});

struct MultiAverage {
  Window window;
  // The averaged function at each sampler point.
  std::vector<cplx> values;
  double l2_sampled = 0.0;
  double l2_std_error = 0.0;  // 0 when the sampler enumerates the whole space
  // ‖A‖_{L²} from the spectrum of the average; exact on the quantized system.
  double l2_spectral = 0.0;
  std::size_t samples = 0;
};

/// (1/(N−M)) Σ_n ∏_j (∏_i T_i^{[p_ij(n)]}) f_j, with f_0 ignored.
MultiAverage multi_average(const CorrelationSpec& spec, Window window);

struct CauchyRow {
  Window from;
  Window to;
  double diff_l2 = 0.0;  // ‖A_to − A_from‖_{L²}, spectral
};

struct CauchyReport {
  std::vector<CauchyRow> rows;
  double tolerance = 0.0;
  bool converged = false;  // last two differences below tolerance
};

/// Ladder [M, M+L·2^k), k = 0..steps−1, differences between consecutive averages.
CauchyReport cauchy_report(const CorrelationSpec& spec, std::int64_t begin, std::int64_t base_length, int steps,
                           double tolerance);

struct WindowFamily {
  std::vector<Window> windows;
  void validate() const;
  // [M, M+L_k) for the given lengths.
  static WindowFamily lengths(std::int64_t begin, const std::vector<std::int64_t>& lengths);
};

struct UniformSeminormReport {
  double value = 0.0;    // ‖a‖₂ estimate
  double squared = 0.0;  // its square: max window mean of |a|²
  Window argmax;
};

/// ‖a‖₂ = limsup sqrt((1/(N−M)) Σ |a(n)|²), estimated as the max over the
/// two longest windows, each shifted by 0, W/2, W, 2W.
UniformSeminormReport uniform_seminorm(const SequenceFn& a, const WindowFamily& family);

}  // namespace ergolab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/correlate.hpp"
#include "ergolab/seminorms.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// A point (x, b) of Y = X × [0,1)^{ℓm}; heights b_ij are stored as 64-bit
/// fractions in row-major (i, j) order.
struct SuspensionPoint {
  StatePoint base;
  std::vector<std::uint64_t> heights;
  friend bool operator==(const SuspensionPoint&, const SuspensionPoint&) = default;
};

/// The ℝ^{ℓm} flow on X × [0,1)^{ℓm}: time s maps (x, b) to
/// (∏ T_i^{[s_ij + b_ij]} x, {s_ij + b_ij}).
class SuspensionFlow {
 public:
  SuspensionFlow(CommutingSystem system, std::size_t m);

  const CommutingSystem& system() const { return system_; }
  std::size_t ell() const { return system_.size(); }
  std::size_t m() const { return m_; }
  std::size_t directions() const { return ell() * m_; }

  // s in row-major (i, j) order.
  SuspensionPoint apply(const std::vector<FixedReal>& s, const SuspensionPoint& pt) const;

 private:
  CommutingSystem system_;
  std::size_t m_ = 1;
};

SuspensionPoint flow_apply(const SuspensionFlow& flow, const std::vector<FixedReal>& s, const SuspensionPoint& pt);

struct FlowPowerReport {
  std::int64_t checked = 0;
  std::int64_t mismatches = 0;
  std::int64_t observable_mismatches = 0;
  std::optional<std::int64_t> first_mismatch;
  bool ok() const { return mismatches == 0 && observable_mismatches == 0; }
};

/// For S = T_s on X × [0,1): checks Sⁿ(x,b) = (T^{[ns+b]}x, {ns+b}) by iteration
/// for n ≤ n_max, and Sⁿf̂(x,0) = f(T^{[ns]}x).
FlowPowerReport flow_power_identity_check(const Transformation& t, FixedReal s, const StatePoint& x,
                                          std::uint64_t b, std::int64_t n_max, const Observable& f);

// ⌊1/s⌋ for s > 0, exact.
std::int64_t floor_reciprocal(FixedReal s);

struct LemmaF5Report {
  double lhs = 0.0;
  // (⌊1/s⌋+1)^k · (1/W^k) Σ over the image box: the finite-window bound.
  double rhs = 0.0;
  // s^k(⌊1/s⌋+1)^k · mean of a over the image box: the limiting form.
  double rhs_limit = 0.0;
  double margin = 0.0;  // rhs − lhs
};

/// a: non-negative values on the grid [0, extent)^k, row-major. Window [M, N) in each coordinate.
LemmaF5Report lemma_f5_check(const std::vector<double>& a, std::int64_t extent, FixedReal s, int k, Window window);

struct LemmaF6Constants {
  long double c_k = 0;
  long double c_ks = 0;
  std::int64_t floor_inv_s = 0;
};

LemmaF6Constants lemma_f6_constants(int k, FixedReal s);

struct LemmaF6Report {
  double lhs = 0.0;        // |||f̂|||_{k,ν,S}
  double seminorm = 0.0;   // |||f|||_{k+1,μ,T}
  double rhs = 0.0;        // c_{k,s} · seminorm
  double margin = 0.0;
  LemmaF6Constants constants;
  int height_bits = 0;
};

/// Exact check on the finite suspension X × ℤ_{2^J}, where s is a multiple of 2^{-J}.
LemmaF6Report lemma_f6_numeric_check(const Observable& f, const Transformation& t, FixedReal s, int k);

// Smallest J with s·2^J an integer, or nullopt when J > max_bits.
std::optional<int> dyadic_bits(FixedReal s, int max_bits = 16);

/// (1/δ^{ℓm}) ∫_{[0,δ]^{ℓm}} a_b(n) db with a_b(n) the correlation at exponents [p_ij(n) + b_ij];
/// exact, since the exponent is piecewise constant in each b_ij.
cplx delta_box_average(const CorrelationSpec& spec, std::int64_t n, FixedReal delta);
// Same integral on a midpoint grid of 2^bits points per direction.
cplx delta_box_average_grid(const CorrelationSpec& spec, std::int64_t n, FixedReal delta, int bits);

struct WeakAntiUniformBound {
  FixedReal delta;
  double lhs = 0.0;          // |avg a·b|
  double box_term = 0.0;     // δ^{-ℓm} |avg ã·b|
  double c_delta = 0.0;      // 2 · sup|b| · Σ_ij density(E_δ^{ij})
  double rhs = 0.0;          // box_term + c_delta
  double margin = 0.0;       // rhs − lhs
  std::vector<double> densities;  // per (i, j), row-major
  double b_uniformity = 0.0;      // ‖b‖_{U_k} estimate
  std::optional<double> empirical_C;       // |avg ã·b| / ‖b‖_{U_k}
  std::optional<double> C_delta;           // empirical_C / δ^{ℓm}
};

WeakAntiUniformBound weak_anti_uniform_bound(const CorrelationSpec& spec, const SequenceSample& b, FixedReal delta,
                                             int k, int H = 16);

}  // namespace ergolab

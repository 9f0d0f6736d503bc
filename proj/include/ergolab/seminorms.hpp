#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergolab/correlate.hpp"
#include "ergolab/observable.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

struct SeqSeminormConfig {
  int k = 2;
  int H = 64;
};

struct SeqSeminormReport {
  double value = 0.0;
  int k = 0;
  int H = 0;
  Window inner;  // common window of the innermost means
};

/// Truncated ‖a‖_{I,k}: ‖a‖_1 = |mean a| and
/// ‖a‖_k^{2^k} = (1/H) Σ_{h=1}^{H} ‖σ_h a · ā‖_{k−1}^{2^{k−1}}.
SeqSeminormReport seq_seminorm(const SequenceSample& a, const SeqSeminormConfig& cfg);

/// Budget on the number of cube terms (including the point sum in exact mode).
inline constexpr std::uint64_t kSeminormBudget = std::uint64_t{1} << 32;

struct HKSeminormConfig {
  int k = 1;
  // Truncated mode: each n_i runs over [start, start + N).
  std::int64_t N = 256;
  std::int64_t start = 1;
  // Exact mode on finite spaces: full periods via the recursive definition.
  bool exact = true;
};

struct HKSeminormReport {
  double value = 0.0;
  double power = 0.0;  // value^{2^k} before the root, clamped at 0
  int k = 0;
  std::string method;  // "exact-recursive", "exact-cube", "truncated-cube"
  std::int64_t period = 0;
};

/// A finite measure-preserving map as a permutation of point_at indices.
struct FinitePermutation {
  std::vector<std::uint32_t> image;
  static FinitePermutation of(const Transformation& t);
  std::uint64_t order() const;  // lcm of cycle lengths
  FinitePermutation inverse() const;
};

std::vector<cplx> tabulate(const Observable& f);

// |||f|||_1 = ‖E(f|I)‖_{L²}, by averaging over cycles.
double invariant_projection_norm(const std::vector<cplx>& f, const FinitePermutation& t);

/// Exact |||f|||_k on a finite system from |||f|||_{k+1}^{2^{k+1}} =
/// avg_n |||f̄ · Tⁿ f|||_k^{2^k}, with averages over a full period.
HKSeminormReport hk_seminorm_exact(const std::vector<cplx>& f, const FinitePermutation& t, int k);

/// Exact |||f|||_k on a finite system from the cube formula with all n_i over a full period.
HKSeminormReport hk_seminorm_cube(const std::vector<cplx>& f, const FinitePermutation& t, int k);

/// Truncated cube average (1/N^k) Σ_n ∫ ∏_ε C^{|ε|} T^{ε·n} f with exact spectral integrals.
HKSeminormReport hk_seminorm_truncated(const Observable& f, const Transformation& t, int k, std::int64_t N,
                                       std::int64_t start = 1);

/// Dispatches on cfg.exact and the space: exact recursion on finite spaces, truncated cube otherwise.
HKSeminormReport hk_seminorm(const Observable& f, const Transformation& t, const HKSeminormConfig& cfg);

struct RelationCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs − lhs for inequalities, −|rhs − lhs| for equalities
  bool equality = false;
};

struct InverseDirectionReport {
  int k = 0;
  std::vector<RelationCheck> checks;
  double worst_margin() const;
};

/// On a finite system: |||f⊗f̄|||_{k,T×T} ≤ |||f|||_{k+1}², |||f|||_k ≤ |||f|||_{k+1},
/// and |||f|||_{k,T} = |||f|||_{k,T⁻¹}, all exact.
InverseDirectionReport hk_inverse_direction_checks(const Observable& f, const Transformation& t, int k);

}  // namespace ergolab

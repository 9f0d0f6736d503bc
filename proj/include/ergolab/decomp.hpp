#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ergolab/correlate.hpp"
#include "ergolab/nil.hpp"

namespace ergolab {

/// Least-squares projection of a window onto span(basis) under the window mean
/// ⟨f, g⟩ = (1/W) Σ f(n) conj(g(n)).
struct GramProjection {
  NilBasis basis;
  Window window;
  Eigen::MatrixXcd gram;
  std::vector<cplx> coefficients;
  std::vector<cplx> inner;  // ⟨a, ψ_j⟩
  double ridge = 0.0;       // 0 unless the Gram matrix was ill-conditioned
  bool ridge_flagged = false;
  double rcond = 1.0;
  std::vector<cplx> nil_part;
  std::vector<cplx> residual;
  double residual_l2 = 0.0;
};

inline constexpr double kRcondThreshold = 1e-12;
inline constexpr std::size_t kDenseMemberBudget = std::size_t{1} << 24;

GramProjection gram_project(const SequenceSample& a, const NilBasis& basis);

// |⟨e, ψ_j⟩| for every member.
std::vector<double> residual_orthogonality(const GramProjection& proj);

// Σ c_j ψ_j(n) over the window.
std::vector<cplx> synthesize(const NilBasis& basis, const std::vector<cplx>& coefficients, Window window);

struct LadderRow {
  std::size_t index = 0;
  std::size_t basis_size = 0;
  double residual_raw = 0.0;    // plain projection, after any sup rescaling
  double residual_fejer = 0.0;  // Fejér-weighted projection, after any sup rescaling
  double residual = 0.0;        // best candidate so far
  std::string source;           // "raw", "fejer" or "carried"
  double max_margin = 0.0;
  bool ridge_flagged = false;
};

struct DecompositionReport {
  bool certified = false;
  std::ptrdiff_t index = -1;  // first certified ladder index
  double epsilon = 0.0;
  double residual = 0.0;      // ‖e‖₂ on the window
  double nil_sup = 0.0;       // after clamping, ≤ 1
  double rescale = 1.0;       // factor applied to the chosen nil part
  std::string source;
  std::vector<double> margins;  // orthogonality margins of the projection at the reported index
  std::vector<LadderRow> ladder;
  std::vector<cplx> coefficients;
  std::vector<std::string> tags;
  Window window;
  std::vector<cplx> nil_part;
  std::vector<cplx> error;
};

// Walks the ladder until ‖e‖₂ ≤ ε (or to the end when run_all is set).
DecompositionReport decompose(const SequenceSample& a, const std::vector<NilBasis>& ladder, double epsilon,
                              bool run_all = false);

}  // namespace ergolab

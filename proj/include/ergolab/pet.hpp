#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ergolab/fixed.hpp"
#include "ergolab/poly.hpp"

namespace ergolab {

/// ℓ×m grid of polynomials; column j is the ℓ-tuple (p_{1,j}, ..., p_{ℓ,j}).
struct PolyFamily {
  std::vector<std::vector<RealPolynomial>> grid;  // grid[i][j]

  std::size_t ell() const { return grid.size(); }
  std::size_t m() const { return grid.empty() ? 0 : grid[0].size(); }
  int max_degree() const;
  void validate() const;
};

struct NiceResult {
  bool nice = false;
  std::string failing;  // empty when nice
};

/// Conditions (i)-(iii) on degrees plus the max-degree-1 clause (one nonzero tuple).
NiceResult is_nice(const PolyFamily& fam);

/// Each entry p of degree r becomes (t^r or 0, ..., t^0 or 0) padded with zeros to
/// d+1 coordinates, d the family's max degree; coordinates become new rows.
PolyFamily vectorize(const PolyFamily& fam);
NiceResult is_r_nice(const PolyFamily& fam);

/// Polynomial in n, h_1, ..., h_D with integer coefficients in units of 2^-64.
class SymPoly {
 public:
  using Monomial = std::vector<int>;  // exponents of (n, h_1, ..., h_D)

  static SymPoly from_real(const RealPolynomial& p);
  SymPoly substitute_shift(int h_index) const;  // n ↦ n + h_{h_index}
  SymPoly operator-(const SymPoly& o) const;

  int degree_in_n() const;  // -1 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  bool n_free() const { return degree_in_n() <= 0; }
  // Part of total n-degree ≥ 1.
  SymPoly n_dependent_part() const;
  std::string to_string() const;
  std::size_t term_count() const { return terms_.size(); }
  friend bool operator==(const SymPoly& a, const SymPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const SymPoly& a, const SymPoly& b) { return a.terms_ < b.terms_; }

 private:
  void trim();
  std::map<Monomial, BigInt> terms_;
};

struct PetStep {
  std::vector<std::string> family;  // columns before the step
  std::size_t pivot = 0;
  std::vector<std::string> result;  // columns after the step
  std::vector<std::pair<int, int>> weight;  // (leading transformation, degree) per column, sorted
};

struct PetTrace {
  std::vector<PetStep> steps;
  int depth = 0;
  int k_estimate = 0;
  bool completed = false;  // false when a guard (depth, columns, terms) stopped the reduction
};

inline constexpr int kPetMaxDepth = 40;
inline constexpr std::size_t kPetMaxColumns = 512;
inline constexpr std::size_t kPetMaxTerms = std::size_t{1} << 18;

PetTrace pet_reduce(const PolyFamily& fam, int max_depth = kPetMaxDepth);

struct VdcReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs − lhs
  // Finite van der Corput bound for the longer window (h = 0 term included).
  double finite_bound = 0.0;
};

/// v[n] is a vector in ℂ^D. Compares max over two windows of ‖mean v_n‖² with
/// 4 (1/H) Σ_{h=1}^{H} max over the windows |mean ⟨v_{n+h}, v_n⟩|.
VdcReport vdc_numeric_check(const std::vector<std::vector<std::complex<double>>>& v, int H);

}  // namespace ergolab

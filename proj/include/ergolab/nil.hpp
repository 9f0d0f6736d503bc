#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/fixed.hpp"
#include "ergolab/observable.hpp"

namespace ergolab {

/// Element of the Heisenberg group in Mal'cev coordinates with product
/// (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x·y').
///
/// x and y carry 64 fractional bits; z carries 128 so that x·y' and the
/// whole group law are exact.
struct HeisenbergElement {
  FixedReal x;
  FixedReal y;
  Int256 z = 0;  // z · 2^128

  static HeisenbergElement make(FixedReal x, FixedReal y, FixedReal z);
  static HeisenbergElement integer(std::int64_t a, std::int64_t b, std::int64_t c);
  // z rounded down to 64 fractional bits.
  FixedReal z_fixed() const;
  long double z_turns_frac() const;  // {z} as a long double

  HeisenbergElement operator*(const HeisenbergElement& o) const;
  HeisenbergElement inverse() const;
  friend bool operator==(const HeisenbergElement&, const HeisenbergElement&) = default;
};

// gⁿ = (n x, n y, n z + C(n,2) x y), exact; throws HeadroomError when out of range.
HeisenbergElement heisenberg_pow(const HeisenbergElement& g, std::int64_t n);

struct MalcevReduction {
  HeisenbergElement lattice;  // integer coordinates
  HeisenbergElement reduced;  // coordinates in [0,1)
};

// g = lattice · reduced, reducing x, then y, then z.
MalcevReduction malcev_reduce(const HeisenbergElement& g);

/// Trigonometric polynomial Σ c e(j·u) on [0,1)^dim.
struct TrigTerm {
  cplx coef;
  std::vector<std::int64_t> freq;
};

class Nilsequence {
 public:
  // Step 0: the constant c.
  static Nilsequence constant(cplx c);
  // Step 1: F({nγ + β}) for F = Σ c e(j·u), u ∈ 𝕋^d.
  static Nilsequence torus(std::vector<FixedReal> gamma, std::vector<FixedReal> beta, std::vector<TrigTerm> F);
  // e(n θ): the single-character torus sequence.
  static Nilsequence character(FixedReal theta);
  // Step 2: F(reduced coordinates of gⁿ) with F = Σ c e(a x + b y + c z).
  static Nilsequence heisenberg(HeisenbergElement g, std::vector<TrigTerm> F);

  int step() const { return step_; }
  double sup_bound() const { return sup_bound_; }
  const std::string& label() const { return label_; }
  // When the sequence is a single character e(nθ): θ's 64 fractional bits and the coefficient.
  std::optional<std::uint64_t> exact_phase() const { return exact_phase_; }
  cplx exact_coef() const { return exact_coef_; }

  cplx operator()(std::int64_t n) const;

 private:
  enum class Kind { Constant, Torus, Heisenberg };
  Kind kind_ = Kind::Constant;
  int step_ = 0;
  std::vector<FixedReal> gamma_, beta_;
  HeisenbergElement g_;
  std::vector<TrigTerm> F_;
  double sup_bound_ = 0.0;
  std::string label_;
  std::optional<std::uint64_t> exact_phase_;
  cplx exact_coef_ = 1.0;

  void normalize();
};

cplx nilseq_eval(const Nilsequence& psi, std::int64_t n);

struct NilBasisMember {
  Nilsequence seq;
  double fejer_weight = 1.0;
  std::string tag;
};

struct NilBasis {
  std::string provenance;  // "torus", "nilkey", "bk", "heisenberg"
  int k = 0;
  std::vector<std::int64_t> exponents;          // ℓ_i
  std::vector<std::int64_t> iterate_exponents;  // exponents multiplying n in the members
  std::vector<NilBasisMember> members;

  std::size_t size() const { return members.size(); }
};

enum class BasisKind { Torus, Nilkey, Bk, Heisenberg };

struct BasisRequest {
  BasisKind kind = BasisKind::Torus;
  int k = 1;
  std::vector<FixedReal> frequencies;
  // Torus: order per frequency (one entry broadcasts). Others: character range per coordinate.
  std::vector<int> orders{1};
  // Torus: per-frequency switch for the Fejér factor (empty means all smoothed).
  std::vector<bool> smooth;
};

inline constexpr std::size_t kMaxBasisSize = 4096;

// ℓ_i = k!/i, i = 1..k
std::vector<std::int64_t> nilkey_exponents(int k);
// ℓ_i = (k+1)!/i, i = 1..k+1
std::vector<std::int64_t> bk_exponents(int k);

NilBasis make_basis(const BasisRequest& request);

}  // namespace ergolab

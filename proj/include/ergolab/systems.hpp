#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/fixed.hpp"

namespace ergolab {

/// One factor of a state space: (ℤ_q)^dim, where modulus 0 stands for
/// q = 2^64, i.e. the torus 𝕋^dim sampled on its 2^-64 lattice.
struct Factor {
  std::uint64_t modulus = 0;
  int dim = 1;

  bool is_torus() const { return modulus == 0; }
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// A point: one 64-bit word per coordinate. Torus words hold the 64
/// fractional bits of the coordinate; cyclic words hold a residue in [0,q).
struct StatePoint {
  std::vector<std::uint64_t> coords;
  friend bool operator==(const StatePoint&, const StatePoint&) = default;
};

class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<Factor> factors);

  static StateSpace torus(int dim);
  static StateSpace cyclic(std::uint64_t q, int dim = 1);
  static StateSpace product(const StateSpace& a, const StateSpace& b);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t words() const { return words_; }
  std::size_t offset(std::size_t factor) const { return offsets_[factor]; }
  // Modulus of the factor owning the given coordinate word (0 = 2^64).
  std::uint64_t word_modulus(std::size_t word) const { return word_mod_[word]; }

  bool finite() const;
  // Number of points; nullopt for tori or when it exceeds 2^62.
  std::optional<std::uint64_t> cardinality() const;
  // Mixed-radix enumeration of a finite space (last word fastest).
  StatePoint point_at(std::uint64_t index) const;
  std::uint64_t index_of(const StatePoint& x) const;

  std::string describe() const;
  friend bool operator==(const StateSpace& a, const StateSpace& b) { return a.factors_ == b.factors_; }

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> word_mod_;
  std::size_t words_ = 0;
};

/// x ↦ A x + b on (ℤ_q)^d, all arithmetic mod q (q = 0 meaning 2^64).
class AffineMap {
 public:
  AffineMap() = default;
  static AffineMap identity(std::uint64_t q, int d);
  static AffineMap translation(std::uint64_t q, std::vector<std::uint64_t> b);
  // Requires |det A| = 1 over the integers.
  static AffineMap linear(std::uint64_t q, const std::vector<std::vector<std::int64_t>>& matrix);

  std::uint64_t modulus() const { return q_; }
  int dim() const { return d_; }
  std::uint64_t matrix(int r, int c) const { return a_[static_cast<std::size_t>(r * d_ + c)]; }
  std::uint64_t offset(int r) const { return b_[static_cast<std::size_t>(r)]; }
  bool linear_part_is_identity() const { return linear_identity_; }

  // (*this) ∘ inner
  AffineMap compose(const AffineMap& inner) const;
  AffineMap inverse() const;
  AffineMap power(std::int64_t m) const;

  void apply(const std::uint64_t* in, std::uint64_t* out) const;

  friend bool operator==(const AffineMap& x, const AffineMap& y) {
    return x.q_ == y.q_ && x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  void refresh();

  std::uint64_t q_ = 0;
  int d_ = 0;
  std::vector<std::uint64_t> a_;
  std::vector<std::uint64_t> b_;
  bool linear_identity_ = true;
};

/// Invertible measure-preserving map of a StateSpace: a product of affine
/// maps, one per factor. Covers cyclic shifts, torus rotations, unimodular
/// toral automorphisms, and their direct products.
class Transformation {
 public:
  Transformation() = default;
  Transformation(StateSpace space, std::vector<AffineMap> parts, std::string label = {});

  static Transformation identity(const StateSpace& space);
  static Transformation cyclic_shift(std::uint64_t q, std::int64_t r);
  static Transformation rotation(const std::vector<FixedReal>& alpha);
  static Transformation automorphism(const std::vector<std::vector<std::int64_t>>& matrix);
  // The automorphism acting on (ℤ_q)^d: a finite analogue of the toral map.
  static Transformation modular_automorphism(std::uint64_t q, const std::vector<std::vector<std::int64_t>>& matrix);
  static Transformation product(const std::vector<Transformation>& maps);

  const StateSpace& space() const { return space_; }
  const std::vector<AffineMap>& parts() const { return parts_; }
  const std::string& label() const { return label_; }

  // T^m in O(1) for translations, O(log|m|) matrix powers otherwise.
  Transformation power(std::int64_t m) const;
  Transformation inverse() const;
  // (*this) ∘ inner
  Transformation compose(const Transformation& inner) const;
  bool commutes_with(const Transformation& other) const;

  StatePoint apply(const StatePoint& x) const;
  void apply(const std::uint64_t* in, std::uint64_t* out) const;

  friend bool operator==(const Transformation& a, const Transformation& b) {
    return a.space_ == b.space_ && a.parts_ == b.parts_;
  }

 private:
  StateSpace space_;
  std::vector<AffineMap> parts_;
  std::string label_;
};

StatePoint power_apply(const Transformation& t, std::int64_t m, const StatePoint& x);

/// Where integrals are evaluated: full enumeration of a finite space, a
/// seeded pseudorandom sample, or a dyadic lattice (2^bits per torus
/// coordinate, full enumeration of cyclic words).
struct Sampler {
  enum class Kind { Enumerate, Random, Lattice };
  Kind kind = Kind::Enumerate;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  int lattice_bits = 0;

  static Sampler enumerate() { return {}; }
  static Sampler random(std::uint64_t seed, std::size_t count) { return {Kind::Random, seed, count, 0}; }
  static Sampler lattice(int bits) { return {Kind::Lattice, 0, 0, bits}; }

  std::vector<StatePoint> points(const StateSpace& space) const;
  std::string describe() const;
};

inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 22;

/// ℓ commuting transformations on one space, plus the sampler used for
/// pointwise quantities. Commutation is verified exactly at construction.
class CommutingSystem {
 public:
  CommutingSystem() = default;
  CommutingSystem(StateSpace space, std::vector<Transformation> maps, Sampler sampler = {});

  const StateSpace& space() const { return space_; }
  const std::vector<Transformation>& maps() const { return maps_; }
  const Transformation& map(std::size_t i) const { return maps_.at(i); }
  std::size_t size() const { return maps_.size(); }
  const Sampler& sampler() const { return sampler_; }
  // Sampler points, computed once at construction.
  const std::vector<StatePoint>& points() const { return *points_; }
  bool exact_measure() const { return sampler_.kind == Sampler::Kind::Enumerate; }

 private:
  StateSpace space_;
  std::vector<Transformation> maps_;
  Sampler sampler_;
  std::shared_ptr<const std::vector<StatePoint>> points_;
};

// Modular helpers (q = 0 means 2^64).
std::uint64_t mod_reduce(std::int64_t v, std::uint64_t q);
std::uint64_t mod_add(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t mod_neg(std::uint64_t a, std::uint64_t q);
// Residue as turns in [0,1).
long double mod_turns(std::uint64_t v, std::uint64_t q);

}  // namespace ergolab

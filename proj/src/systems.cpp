#include "ergolab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab {

std::uint64_t mod_reduce(std::int64_t v, std::uint64_t q) {
  if (q == 0) return static_cast<std::uint64_t>(v);
  const int128 r = static_cast<int128>(v) % static_cast<int128>(q);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<int128>(q) : r);
}

std::uint64_t mod_add(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  if (q == 0) return a + b;
  return static_cast<std::uint64_t>((static_cast<uint128>(a) + b) % q);
}

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  if (q == 0) return a * b;
  return static_cast<std::uint64_t>((static_cast<uint128>(a) * b) % q);
}

std::uint64_t mod_neg(std::uint64_t a, std::uint64_t q) {
  if (q == 0) return static_cast<std::uint64_t>(0) - a;
  return a == 0 ? 0 : q - a;
}

long double mod_turns(std::uint64_t v, std::uint64_t q) {
  if (q == 0) return std::ldexp(static_cast<long double>(v), -64);
  return static_cast<long double>(v) / static_cast<long double>(q);
}

// ---------------------------------------------------------------- StateSpace

StateSpace::StateSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.dim < 1) throw InvalidInput("state-space factor dimension must be >= 1");
    if (f.modulus == 1) throw InvalidInput("cyclic modulus must be >= 2");
    offsets_.push_back(words_);
    for (int i = 0; i < f.dim; ++i) word_mod_.push_back(f.modulus);
    words_ += static_cast<std::size_t>(f.dim);
  }
}

StateSpace StateSpace::torus(int dim) { return StateSpace({Factor{0, dim}}); }
StateSpace StateSpace::cyclic(std::uint64_t q, int dim) { return StateSpace({Factor{q, dim}}); }

StateSpace StateSpace::product(const StateSpace& a, const StateSpace& b) {
  std::vector<Factor> f = a.factors_;
  f.insert(f.end(), b.factors_.begin(), b.factors_.end());
  return StateSpace(std::move(f));
}

bool StateSpace::finite() const {
  for (const auto& f : factors_) {
    if (f.is_torus()) return false;
  }
  return true;
}

std::optional<std::uint64_t> StateSpace::cardinality() const {
  if (!finite()) return std::nullopt;
  uint128 n = 1;
  for (std::size_t w = 0; w < words_; ++w) {
    n *= word_mod_[w];
    if (n > (uint128{1} << 62)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(n);
}

StatePoint StateSpace::point_at(std::uint64_t index) const {
  StatePoint x{std::vector<std::uint64_t>(words_, 0)};
  for (std::size_t w = words_; w-- > 0;) {
    const std::uint64_t q = word_mod_[w];
    if (q == 0) throw InvalidInput("point_at needs a finite space");
    x.coords[w] = index % q;
    index /= q;
  }
  return x;
}

std::uint64_t StateSpace::index_of(const StatePoint& x) const {
  std::uint64_t index = 0;
  for (std::size_t w = 0; w < words_; ++w) index = index * word_mod_[w] + x.coords[w];
  return index;
}

std::string StateSpace::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << " x ";
    if (factors_[i].is_torus()) {
      os << "T^" << factors_[i].dim;
    } else {
      os << "Z_" << factors_[i].modulus;
      if (factors_[i].dim > 1) os << '^' << factors_[i].dim;
    }
  }
  return os.str();
}

// ------------------------------------------------------------------ AffineMap

namespace {

BigInt exact_det(const std::vector<std::vector<std::int64_t>>& m) {
  const std::size_t d = m.size();
  if (d == 1) return BigInt(m[0][0]);
  BigInt det = 0;
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<std::vector<std::int64_t>> minor;
    for (std::size_t r = 1; r < d; ++r) {
      std::vector<std::int64_t> row;
      for (std::size_t k = 0; k < d; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(std::move(row));
    }
    const BigInt term = BigInt(m[0][c]) * exact_det(minor);
    det += (c % 2 == 0) ? term : BigInt(-term);
  }
  return det;
}

std::uint64_t det_mod(const std::vector<std::uint64_t>& a, int d, std::uint64_t q) {
  if (d == 1) return a[0];
  std::uint64_t det = 0;
  for (int c = 0; c < d; ++c) {
    std::vector<std::uint64_t> minor;
    for (int r = 1; r < d; ++r) {
      for (int k = 0; k < d; ++k) {
        if (k != c) minor.push_back(a[static_cast<std::size_t>(r * d + k)]);
      }
    }
    std::uint64_t term = mod_mul(a[static_cast<std::size_t>(c)], det_mod(minor, d - 1, q), q);
    if (c % 2 == 1) term = mod_neg(term, q);
    det = mod_add(det, term, q);
  }
  return det;
}

}  // namespace

void AffineMap::refresh() {
  linear_identity_ = true;
  for (int r = 0; r < d_; ++r) {
    for (int c = 0; c < d_; ++c) {
      if (matrix(r, c) != (r == c ? 1u : 0u)) linear_identity_ = false;
    }
  }
}

AffineMap AffineMap::identity(std::uint64_t q, int d) {
  AffineMap m;
  m.q_ = q;
  m.d_ = d;
  m.a_.assign(static_cast<std::size_t>(d * d), 0);
  for (int i = 0; i < d; ++i) m.a_[static_cast<std::size_t>(i * d + i)] = 1;
  m.b_.assign(static_cast<std::size_t>(d), 0);
  m.linear_identity_ = true;
  return m;
}

AffineMap AffineMap::translation(std::uint64_t q, std::vector<std::uint64_t> b) {
  AffineMap m = identity(q, static_cast<int>(b.size()));
  for (auto& v : b) v = q == 0 ? v : v % q;
  m.b_ = std::move(b);
  return m;
}

AffineMap AffineMap::linear(std::uint64_t q, const std::vector<std::vector<std::int64_t>>& matrix) {
  const int d = static_cast<int>(matrix.size());
  if (d < 1 || d > 6) throw InvalidInput("automorphism dimension must be in [1,6]");
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != d) throw InvalidInput("automorphism matrix must be square");
  }
  const BigInt det = exact_det(matrix);
  if (det != 1 && det != -1) throw InvalidInput("automorphism matrix must have determinant +-1");
  AffineMap m = identity(q, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m.a_[static_cast<std::size_t>(r * d + c)] = mod_reduce(matrix[r][c], q);
  }
  m.refresh();
  return m;
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  if (q_ != inner.q_ || d_ != inner.d_) throw InvalidInput("composing affine maps on different factors");
  AffineMap out;
  out.q_ = q_;
  out.d_ = d_;
  out.a_.assign(a_.size(), 0);
  out.b_ = b_;
  if (linear_identity_) {
    out.a_ = inner.a_;
    for (int r = 0; r < d_; ++r) out.b_[r] = mod_add(inner.b_[r], b_[r], q_);
    out.linear_identity_ = inner.linear_identity_;
    return out;
  }
  for (int r = 0; r < d_; ++r) {
    for (int c = 0; c < d_; ++c) {
      std::uint64_t s = 0;
      for (int k = 0; k < d_; ++k) s = mod_add(s, mod_mul(matrix(r, k), inner.matrix(k, c), q_), q_);
      out.a_[static_cast<std::size_t>(r * d_ + c)] = s;
    }
    std::uint64_t s = b_[r];
    for (int k = 0; k < d_; ++k) s = mod_add(s, mod_mul(matrix(r, k), inner.b_[k], q_), q_);
    out.b_[r] = s;
  }
  out.refresh();
  return out;
}

AffineMap AffineMap::inverse() const {
  AffineMap inv = identity(q_, d_);
  if (!linear_identity_) {
    // A^{-1} = det(A)^{-1} adj(A), and det(A) = ±1 is its own inverse.
    const std::uint64_t det = det_mod(a_, d_, q_);
    for (int r = 0; r < d_; ++r) {
      for (int c = 0; c < d_; ++c) {
        std::uint64_t cof = 1;
        if (d_ > 1) {
          std::vector<std::uint64_t> minor;
          for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
              if (i != c && j != r) minor.push_back(matrix(i, j));
            }
          }
          cof = det_mod(minor, d_ - 1, q_);
          if ((r + c) % 2 == 1) cof = mod_neg(cof, q_);
        }
        inv.a_[static_cast<std::size_t>(r * d_ + c)] = mod_mul(det, cof, q_);
      }
    }
    inv.refresh();
  }
  // x = A^{-1}(y − b)
  for (int r = 0; r < d_; ++r) {
    std::uint64_t s = 0;
    for (int k = 0; k < d_; ++k) s = mod_add(s, mod_mul(inv.matrix(r, k), b_[k], q_), q_);
    inv.b_[r] = mod_neg(s, q_);
  }
  return inv;
}

AffineMap AffineMap::power(std::int64_t m) const {
  if (linear_identity_) {
    AffineMap out = *this;
    const std::uint64_t mm = mod_reduce(m, q_);
    for (auto& v : out.b_) v = mod_mul(v, mm, q_);
    return out;
  }
  AffineMap base = m < 0 ? inverse() : *this;
  // |m| as unsigned so that INT64_MIN is handled.
  std::uint64_t e = m < 0 ? static_cast<std::uint64_t>(0) - static_cast<std::uint64_t>(m) : static_cast<std::uint64_t>(m);
  AffineMap result = identity(q_, d_);
  while (e) {
    if (e & 1) result = base.compose(result);
    e >>= 1;
    if (e) base = base.compose(base);
  }
  return result;
}

void AffineMap::apply(const std::uint64_t* in, std::uint64_t* out) const {
  if (linear_identity_) {
    for (int r = 0; r < d_; ++r) out[r] = mod_add(in[r], b_[static_cast<std::size_t>(r)], q_);
    return;
  }
  std::uint64_t tmp[6];
  for (int r = 0; r < d_; ++r) {
    std::uint64_t s = b_[static_cast<std::size_t>(r)];
    for (int k = 0; k < d_; ++k) s = mod_add(s, mod_mul(matrix(r, k), in[k], q_), q_);
    tmp[r] = s;
  }
  for (int r = 0; r < d_; ++r) out[r] = tmp[r];
}

// ------------------------------------------------------------- Transformation

Transformation::Transformation(StateSpace space, std::vector<AffineMap> parts, std::string label)
    : space_(std::move(space)), parts_(std::move(parts)), label_(std::move(label)) {
  if (parts_.size() != space_.factors().size()) throw InvalidInput("one affine map per factor required");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const Factor& f = space_.factors()[i];
    if (parts_[i].modulus() != f.modulus || parts_[i].dim() != f.dim) {
      throw InvalidInput("affine map does not match its factor");
    }
  }
}

Transformation Transformation::identity(const StateSpace& space) {
  std::vector<AffineMap> parts;
  for (const auto& f : space.factors()) parts.push_back(AffineMap::identity(f.modulus, f.dim));
  return Transformation(space, std::move(parts), "id");
}

Transformation Transformation::cyclic_shift(std::uint64_t q, std::int64_t r) {
  if (q < 2) throw InvalidInput("cyclic modulus must be >= 2");
  return Transformation(StateSpace::cyclic(q), {AffineMap::translation(q, {mod_reduce(r, q)})},
                        "shift(Z_" + std::to_string(q) + ", " + std::to_string(r) + ")");
}

Transformation Transformation::rotation(const std::vector<FixedReal>& alpha) {
  if (alpha.empty()) throw InvalidInput("rotation needs at least one frequency");
  std::vector<std::uint64_t> b;
  for (auto a : alpha) b.push_back(a.frac_bits());
  return Transformation(StateSpace::torus(static_cast<int>(alpha.size())), {AffineMap::translation(0, std::move(b))},
                        "rotation");
}

Transformation Transformation::automorphism(const std::vector<std::vector<std::int64_t>>& matrix) {
  return Transformation(StateSpace::torus(static_cast<int>(matrix.size())), {AffineMap::linear(0, matrix)},
                        "automorphism");
}

Transformation Transformation::modular_automorphism(std::uint64_t q, const std::vector<std::vector<std::int64_t>>& matrix) {
  if (q < 2) throw InvalidInput("cyclic modulus must be >= 2");
  return Transformation(StateSpace::cyclic(q, static_cast<int>(matrix.size())), {AffineMap::linear(q, matrix)},
                        "automorphism mod " + std::to_string(q));
}

Transformation Transformation::product(const std::vector<Transformation>& maps) {
  if (maps.empty()) throw InvalidInput("empty product of transformations");
  StateSpace space = maps.front().space();
  std::vector<AffineMap> parts = maps.front().parts();
  std::string label = maps.front().label();
  for (std::size_t i = 1; i < maps.size(); ++i) {
    space = StateSpace::product(space, maps[i].space());
    parts.insert(parts.end(), maps[i].parts().begin(), maps[i].parts().end());
    label += " x " + maps[i].label();
  }
  return Transformation(std::move(space), std::move(parts), std::move(label));
}

Transformation Transformation::power(std::int64_t m) const {
  std::vector<AffineMap> parts;
  parts.reserve(parts_.size());
  for (const auto& p : parts_) parts.push_back(p.power(m));
  return Transformation(space_, std::move(parts), label_);
}

Transformation Transformation::inverse() const {
  std::vector<AffineMap> parts;
  for (const auto& p : parts_) parts.push_back(p.inverse());
  return Transformation(space_, std::move(parts), label_ + "^-1");
}

Transformation Transformation::compose(const Transformation& inner) const {
  if (!(space_ == inner.space_)) throw InvalidInput("composing transformations on different spaces");
  std::vector<AffineMap> parts;
  for (std::size_t i = 0; i < parts_.size(); ++i) parts.push_back(parts_[i].compose(inner.parts_[i]));
  return Transformation(space_, std::move(parts), label_);
}

bool Transformation::commutes_with(const Transformation& other) const {
  return compose(other) == other.compose(*this);
}

StatePoint Transformation::apply(const StatePoint& x) const {
  StatePoint y{std::vector<std::uint64_t>(x.coords.size())};
  apply(x.coords.data(), y.coords.data());
  return y;
}

void Transformation::apply(const std::uint64_t* in, std::uint64_t* out) const {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const std::size_t off = space_.offset(i);
    parts_[i].apply(in + off, out + off);
  }
}

StatePoint power_apply(const Transformation& t, std::int64_t m, const StatePoint& x) { return t.power(m).apply(x); }

// -------------------------------------------------------------------- Sampler

std::vector<StatePoint> Sampler::points(const StateSpace& space) const {
  std::vector<StatePoint> pts;
  switch (kind) {
    case Kind::Enumerate: {
      const auto n = space.cardinality();
      if (!n) throw InvalidInput("enumeration sampler needs a finite state space");
      if (*n > kEnumerationBudget) throw BudgetExceeded("state space too large to enumerate: " + std::to_string(*n));
      pts.reserve(*n);
      for (std::uint64_t i = 0; i < *n; ++i) pts.push_back(space.point_at(i));
      break;
    }
    case Kind::Random: {
      if (count == 0) throw InvalidInput("random sampler needs a positive count");
      std::mt19937_64 rng(seed);
      pts.reserve(count);
      for (std::size_t s = 0; s < count; ++s) {
        StatePoint x{std::vector<std::uint64_t>(space.words())};
        for (std::size_t w = 0; w < space.words(); ++w) {
          const std::uint64_t q = space.word_modulus(w);
          if (q == 0) {
            x.coords[w] = rng();
          } else {
            // Rejection keeps the residue exactly uniform.
            const std::uint64_t threshold = (static_cast<std::uint64_t>(0) - q) % q;
            std::uint64_t r;
            do r = rng();
            while (r < threshold);
            x.coords[w] = r % q;
          }
        }
        pts.push_back(std::move(x));
      }
      break;
    }
    case Kind::Lattice: {
      if (lattice_bits < 1 || lattice_bits > 20) throw InvalidInput("lattice bits must be in [1,20]");
      uint128 total = 1;
      std::vector<std::uint64_t> radix(space.words());
      for (std::size_t w = 0; w < space.words(); ++w) {
        const std::uint64_t q = space.word_modulus(w);
        radix[w] = q == 0 ? (std::uint64_t{1} << lattice_bits) : q;
        total *= radix[w];
        if (total > kEnumerationBudget) throw BudgetExceeded("lattice sampler exceeds the enumeration budget");
      }
      for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(total); ++i) {
        StatePoint x{std::vector<std::uint64_t>(space.words())};
        std::uint64_t idx = i;
        for (std::size_t w = space.words(); w-- > 0;) {
          const std::uint64_t digit = idx % radix[w];
          idx /= radix[w];
          x.coords[w] = space.word_modulus(w) == 0 ? digit << (64 - lattice_bits) : digit;
        }
        pts.push_back(std::move(x));
      }
      break;
    }
  }
  return pts;
}

std::string Sampler::describe() const {
  switch (kind) {
    case Kind::Enumerate:
      return "enumerate";
    case Kind::Random:
      return "random(seed=" + std::to_string(seed) + ", count=" + std::to_string(count) + ")";
    case Kind::Lattice:
      return "lattice(bits=" + std::to_string(lattice_bits) + ")";
  }
  return "?";
}

// ------------------------------------------------------------ CommutingSystem

CommutingSystem::CommutingSystem(StateSpace space, std::vector<Transformation> maps, Sampler sampler)
    : space_(std::move(space)), maps_(std::move(maps)), sampler_(sampler) {
  for (const auto& t : maps_) {
    if (!(t.space() == space_)) throw InvalidInput("transformation acts on a different state space");
  }
  points_ = std::make_shared<const std::vector<StatePoint>>(sampler_.points(space_));
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    for (std::size_t j = i + 1; j < maps_.size(); ++j) {
      if (!maps_[i].commutes_with(maps_[j])) {
        throw InvalidInput("transformations " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                           " do not commute");
      }
      // Pointwise confirmation on the first sample points.
      const std::size_t probe = std::min<std::size_t>(points_->size(), 32);
      for (std::size_t s = 0; s < probe; ++s) {
        const StatePoint& x = (*points_)[s];
        if (!(maps_[i].apply(maps_[j].apply(x)) == maps_[j].apply(maps_[i].apply(x)))) {
          throw InvalidInput("transformations fail to commute on a sample point");
        }
      }
    }
  }
}

}  // namespace ergolab

#include "ergolab/nil.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

const Int256 kTwo64 = Int256(1) << 64;
const Int256 kTwo128 = Int256(1) << 128;

Int256 product_raw(FixedReal a, FixedReal b) { return to_int256(a.raw()) * to_int256(b.raw()); }

// Top 64 fractional bits of a value with 128 fractional bits, as turns in [0,1).
long double frac128_turns(const Int256& z) {
  const Int256 fl = floor_shift(z, 128);
  const Int256 frac = z - fl * kTwo128;  // in [0, 2^128)
  const auto top = static_cast<std::uint64_t>(frac >> 64);
  return std::ldexp(static_cast<long double>(top), -64);
}

}  // namespace

HeisenbergElement HeisenbergElement::make(FixedReal x, FixedReal y, FixedReal z) {
  return {x, y, to_int256(z.raw()) * kTwo64};
}

HeisenbergElement HeisenbergElement::integer(std::int64_t a, std::int64_t b, std::int64_t c) {
  return make(FixedReal::from_int(a), FixedReal::from_int(b), FixedReal::from_int(c));
}

FixedReal HeisenbergElement::z_fixed() const { return FixedReal::from_raw(to_int128(floor_shift(z, 64))); }

long double HeisenbergElement::z_turns_frac() const { return frac128_turns(z); }

HeisenbergElement HeisenbergElement::operator*(const HeisenbergElement& o) const {
  try {
    return {x + o.x, y + o.y, z + o.z + product_raw(x, o.y)};
  } catch (const std::overflow_error&) {
    throw HeadroomError("Heisenberg product leaves the 256-bit range");
  }
}

HeisenbergElement HeisenbergElement::inverse() const {
  return {-x, -y, Int256(-z) + product_raw(x, y)};
}

HeisenbergElement heisenberg_pow(const HeisenbergElement& g, std::int64_t n) {
  try {
    const Int256 nn(n);
    const Int256 choose2 = nn * (nn - 1) / 2;
    return {g.x.times(n), g.y.times(n), nn * g.z + choose2 * product_raw(g.x, g.y)};
  } catch (const std::overflow_error&) {
    throw HeadroomError("Heisenberg power leaves the 256-bit range");
  }
}

MalcevReduction malcev_reduce(const HeisenbergElement& g) {
  const std::int64_t a = g.x.floor();
  const std::int64_t b = g.y.floor();
  const FixedReal hx = g.x.frac();
  const FixedReal hy = g.y.frac();
  // (a,b,c)(hx,hy,hz) = (a+hx, b+hy, c+hz+a·hy)
  const Int256 rest = g.z - Int256(a) * to_int256(hy.raw()) * kTwo64;
  const Int256 c = floor_shift(rest, 128);
  MalcevReduction out;
  out.lattice = {FixedReal::from_int(a), FixedReal::from_int(b), c * kTwo128};
  out.reduced = {hx, hy, rest - c * kTwo128};
  return out;
}

// ---------------------------------------------------------------- sequences

void Nilsequence::normalize() {
  double bound = 0.0;
  for (const auto& t : F_) bound += std::abs(t.coef);
  if (bound > 1.0) {
    for (auto& t : F_) t.coef /= bound;
    bound = 1.0;
  }
  sup_bound_ = bound;
}

Nilsequence Nilsequence::constant(cplx c) {
  Nilsequence s;
  s.kind_ = Kind::Constant;
  s.F_ = {{c, {}}};
  s.normalize();
  s.label_ = "constant";
  s.exact_phase_ = 0;
  s.exact_coef_ = s.F_[0].coef;
  return s;
}

Nilsequence Nilsequence::torus(std::vector<FixedReal> gamma, std::vector<FixedReal> beta, std::vector<TrigTerm> F) {
  if (gamma.empty()) throw InvalidInput("torus nilsequence needs a frequency");
  if (beta.empty()) beta.assign(gamma.size(), FixedReal());
  if (beta.size() != gamma.size()) throw InvalidInput("offset and frequency dimensions differ");
  for (const auto& t : F) {
    if (t.freq.size() != gamma.size()) throw InvalidInput("trigonometric term has the wrong dimension");
  }
  Nilsequence s;
  s.kind_ = Kind::Torus;
  s.step_ = 1;
  s.gamma_ = std::move(gamma);
  s.beta_ = std::move(beta);
  s.F_ = std::move(F);
  s.normalize();
  s.label_ = "torus";
  return s;
}

Nilsequence Nilsequence::character(FixedReal theta) {
  Nilsequence s = torus({theta}, {}, {{1.0, {1}}});
  s.exact_phase_ = theta.frac_bits();
  s.exact_coef_ = 1.0;
  s.label_ = "e(n*" + theta.to_string(6) + ")";
  return s;
}

Nilsequence Nilsequence::heisenberg(HeisenbergElement g, std::vector<TrigTerm> F) {
  for (const auto& t : F) {
    if (t.freq.size() != 3) throw InvalidInput("Heisenberg trigonometric terms need 3 frequencies");
  }
  Nilsequence s;
  s.kind_ = Kind::Heisenberg;
  s.step_ = 2;
  s.g_ = g;
  s.F_ = std::move(F);
  s.normalize();
  s.label_ = "heisenberg";
  return s;
}

cplx Nilsequence::operator()(std::int64_t n) const {
  lcplx s = 0.0L;
  switch (kind_) {
    case Kind::Constant:
      return F_[0].coef;
    case Kind::Torus: {
      std::vector<std::uint64_t> u(gamma_.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = static_cast<std::uint64_t>(n) * gamma_[i].frac_bits() + beta_[i].frac_bits();
      }
      for (const auto& t : F_) {
        std::uint64_t phase = 0;
        for (std::size_t i = 0; i < u.size(); ++i) phase += static_cast<std::uint64_t>(t.freq[i]) * u[i];
        s += lcplx(t.coef.real(), t.coef.imag()) * expi_turns(std::ldexp(static_cast<long double>(phase), -64));
      }
      break;
    }
    case Kind::Heisenberg: {
      const HeisenbergElement h = malcev_reduce(heisenberg_pow(g_, n)).reduced;
      const long double hx = h.x.to_long_double();
      const long double hy = h.y.to_long_double();
      const long double hz = h.z_turns_frac();
      for (const auto& t : F_) {
        const long double ph = static_cast<long double>(t.freq[0]) * hx + static_cast<long double>(t.freq[1]) * hy +
                               static_cast<long double>(t.freq[2]) * hz;
        s += lcplx(t.coef.real(), t.coef.imag()) * expi_turns(ph);
      }
      break;
    }
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

cplx nilseq_eval(const Nilsequence& psi, std::int64_t n) { return psi(n); }

// ------------------------------------------------------------------- bases

std::vector<std::int64_t> nilkey_exponents(int k) {
  if (k < 1 || k > 12) throw InvalidInput("nilkey step must be in [1,12]");
  std::int64_t fact = 1;
  for (int i = 2; i <= k; ++i) fact *= i;
  std::vector<std::int64_t> l;
  for (int i = 1; i <= k; ++i) l.push_back(fact / i);
  return l;
}

std::vector<std::int64_t> bk_exponents(int k) {
  if (k < 1 || k > 11) throw InvalidInput("B_k step must be in [1,11]");
  return nilkey_exponents(k + 1);
}

namespace {

// 0, 1, −1, 2, −2, ..., r, −r
std::vector<std::int64_t> symmetric_range(int r) {
  std::vector<std::int64_t> v{0};
  for (int j = 1; j <= r; ++j) {
    v.push_back(j);
    v.push_back(-j);
  }
  return v;
}

// All tuples of the given per-coordinate ranges, first coordinate slowest.
template <class Visit>
void for_each_tuple(const std::vector<std::vector<std::int64_t>>& ranges, Visit&& visit) {
  std::vector<std::size_t> idx(ranges.size(), 0);
  std::vector<std::int64_t> t(ranges.size());
  while (true) {
    for (std::size_t i = 0; i < ranges.size(); ++i) t[i] = ranges[i][idx[i]];
    visit(t);
    std::size_t pos = ranges.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < ranges[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
    if (ranges.empty()) return;
  }
}

std::string tuple_tag(const std::vector<std::int64_t>& t) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ')';
  return os.str();
}

void guard_size(long double count) {
  if (count > static_cast<long double>(kMaxBasisSize) * 64) {
    throw BudgetExceeded("basis request enumerates too many candidates");
  }
}

}  // namespace

NilBasis make_basis(const BasisRequest& req) {
  if (req.frequencies.empty()) throw InvalidInput("basis needs at least one frequency");
  if (req.orders.empty()) throw InvalidInput("basis needs an order");
  for (int o : req.orders) {
    if (o < 0) throw InvalidInput("basis orders must be non-negative");
  }
  const std::size_t d = req.frequencies.size();
  if (!req.smooth.empty() && req.smooth.size() != d) throw InvalidInput("one smoothing flag per frequency");
  auto order_of = [&](std::size_t i) { return req.orders.size() == 1 ? req.orders[0] : req.orders.at(i); };
  if (req.orders.size() != 1 && req.orders.size() != d) throw InvalidInput("one order per frequency, or a single order");

  NilBasis basis;
  basis.k = req.k;
  std::set<std::uint64_t> seen;
  auto add_character = [&](std::uint64_t bits, double weight, std::string tag) {
    if (!seen.insert(bits).second) return;
    if (basis.members.size() >= kMaxBasisSize) throw BudgetExceeded("basis larger than the configured maximum");
    basis.members.push_back({Nilsequence::character(FixedReal::from_fraction_bits(bits)), weight, std::move(tag)});
  };

  switch (req.kind) {
    case BasisKind::Torus: {
      basis.provenance = "torus";
      std::vector<std::vector<std::int64_t>> ranges;
      long double count = 1;
      for (std::size_t i = 0; i < d; ++i) {
        ranges.push_back(symmetric_range(order_of(i)));
        count *= static_cast<long double>(ranges.back().size());
      }
      guard_size(count);
      for_each_tuple(ranges, [&](const std::vector<std::int64_t>& j) {
        std::uint64_t bits = 0;
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
          bits += static_cast<std::uint64_t>(j[i]) * req.frequencies[i].frac_bits();
          if (req.smooth.empty() || req.smooth.at(i)) {
            w *= 1.0 - static_cast<double>(std::llabs(j[i])) / (order_of(i) + 1.0);
          }
        }
        add_character(bits, w, "j=" + tuple_tag(j));
      });
      break;
    }
    case BasisKind::Nilkey:
    case BasisKind::Bk: {
      const bool nilkey = req.kind == BasisKind::Nilkey;
      basis.provenance = nilkey ? "nilkey" : "bk";
      basis.exponents = nilkey ? nilkey_exponents(req.k) : bk_exponents(req.k);
      const std::size_t r = static_cast<std::size_t>(req.k);
      for (std::size_t i = 0; i < r; ++i) {
        basis.iterate_exponents.push_back(nilkey ? basis.exponents[i] : basis.exponents[i] - basis.exponents[r]);
      }
      // Members ∫ ∏ S^{e_i n} f_i for a rotation S by the frequencies and characters
      // f_i = e(j_i·x); for nilkey there is no f_0, so the j_i must sum to zero.
      std::vector<std::vector<std::int64_t>> ranges;
      long double count = 1;
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
          ranges.push_back(symmetric_range(order_of(c)));
          count *= static_cast<long double>(ranges.back().size());
        }
      }
      guard_size(count);
      for_each_tuple(ranges, [&](const std::vector<std::int64_t>& j) {
        if (nilkey) {
          for (std::size_t c = 0; c < d; ++c) {
            std::int64_t sum = 0;
            for (std::size_t i = 0; i < r; ++i) sum += j[i * d + c];
            if (sum != 0) return;
          }
        }
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < r; ++i) {
          for (std::size_t c = 0; c < d; ++c) {
            bits += static_cast<std::uint64_t>(basis.iterate_exponents[i] * j[i * d + c]) *
                    req.frequencies[c].frac_bits();
          }
        }
        add_character(bits, 1.0, "j=" + tuple_tag(j));
      });
      break;
    }
    case BasisKind::Heisenberg: {
      if (d != 2) throw InvalidInput("Heisenberg basis needs two frequencies");
      basis.provenance = "heisenberg";
      const HeisenbergElement g = HeisenbergElement::make(req.frequencies[0], req.frequencies[1], FixedReal());
      const int r = req.orders[0];
      const auto range = symmetric_range(r);
      guard_size(std::pow(static_cast<long double>(range.size()), 3));
      for_each_tuple({range, range, range}, [&](const std::vector<std::int64_t>& j) {
        if (basis.members.size() >= kMaxBasisSize) throw BudgetExceeded("basis larger than the configured maximum");
        if (j[2] == 0) {
          // z-free members are torus characters of (x,y).
          std::uint64_t bits = static_cast<std::uint64_t>(j[0]) * req.frequencies[0].frac_bits() +
                               static_cast<std::uint64_t>(j[1]) * req.frequencies[1].frac_bits();
          add_character(bits, 1.0, "abc=" + tuple_tag(j));
          return;
        }
        basis.members.push_back({Nilsequence::heisenberg(g, {{1.0, j}}), 1.0, "abc=" + tuple_tag(j)});
      });
      break;
    }
  }
  return basis;
}

}  // namespace ergolab

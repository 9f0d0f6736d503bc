#include "ergolab/observable.hpp"

#include <cmath>
#include <numbers>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

lcplx expi_turns(long double t) {
  t -= std::floor(t);
  const long double a = 2.0L * std::numbers::pi_v<long double> * t;
  return {std::cos(a), std::sin(a)};
}

std::size_t FrequencyHash::operator()(const Frequency& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto v : k) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 33));
}

bool is_zero_frequency(const Frequency& k) {
  for (auto v : k) {
    if (v != 0) return false;
  }
  return true;
}

namespace {

Frequency reduce_frequency(const StateSpace& space, const std::vector<std::int64_t>& k) {
  if (k.size() != space.words()) throw InvalidInput("frequency vector has the wrong length");
  Frequency out(k.size());
  for (std::size_t w = 0; w < k.size(); ++w) out[w] = mod_reduce(k[w], space.word_modulus(w));
  return out;
}

long double dot_turns(const StateSpace& space, const Frequency& k, const std::uint64_t* x) {
  long double t = 0.0L;
  for (std::size_t w = 0; w < k.size(); ++w) {
    if (k[w] == 0) continue;
    const std::uint64_t q = space.word_modulus(w);
    t += mod_turns(mod_mul(k[w], x[w], q), q);
  }
  return t;
}

Frequency negate(const StateSpace& space, const Frequency& k) {
  Frequency out(k.size());
  for (std::size_t w = 0; w < k.size(); ++w) out[w] = mod_neg(k[w], space.word_modulus(w));
  return out;
}

Frequency add(const StateSpace& space, const Frequency& a, const Frequency& b) {
  Frequency out(a.size());
  for (std::size_t w = 0; w < a.size(); ++w) out[w] = mod_add(a[w], b[w], space.word_modulus(w));
  return out;
}

constexpr std::uint64_t kTableBudget = 4096;

}  // namespace

void Observable::merge_terms() {
  SpectrumMap acc;
  std::vector<Frequency> order;
  for (auto& t : terms_) {
    auto [it, inserted] = acc.try_emplace(t.freq, t.coef);
    if (inserted) {
      order.push_back(t.freq);
    } else {
      it->second += t.coef;
    }
  }
  long double scale = 0.0L;
  for (const auto& [k, c] : acc) scale += std::abs(c);
  std::vector<Term> merged;
  for (auto& k : order) {
    const lcplx c = acc[k];
    if (std::abs(c) <= 1e-18L * scale && !(scale == 0.0L)) continue;
    if (c == lcplx(0.0L)) continue;
    merged.push_back({c, k});
  }
  terms_ = std::move(merged);
}

Observable Observable::constant(const StateSpace& space, cplx c) {
  Observable f;
  f.space_ = space;
  if (std::abs(c) > 1.0) {
    f.normalization_ = 1.0 / std::abs(c);
    c *= f.normalization_;
  }
  if (c != cplx(0.0)) f.terms_.push_back({lcplx(c.real(), c.imag()), Frequency(space.words(), 0)});
  f.sup_bound_ = std::abs(c);
  f.label_ = "constant";
  return f;
}

Observable Observable::character(const StateSpace& space, const std::vector<std::int64_t>& k) {
  Observable f;
  f.space_ = space;
  f.terms_.push_back({lcplx(1.0L), reduce_frequency(space, k)});
  f.sup_bound_ = 1.0;
  f.label_ = "character";
  return f;
}

Observable Observable::residue_character(std::uint64_t q, std::int64_t r) {
  Observable f = character(StateSpace::cyclic(q), {r});
  f.label_ = "chi_" + std::to_string(r) + " mod " + std::to_string(q);
  return f;
}

Observable Observable::trig_polynomial(const StateSpace& space,
                                       const std::vector<std::pair<cplx, std::vector<std::int64_t>>>& terms) {
  Observable f;
  f.space_ = space;
  for (const auto& [c, k] : terms) f.terms_.push_back({lcplx(c.real(), c.imag()), reduce_frequency(space, k)});
  f.merge_terms();
  long double bound = 0.0L;
  for (const auto& t : f.terms_) bound += std::abs(t.coef);
  if (bound > 1.0L) {
    for (auto& t : f.terms_) t.coef /= bound;
    f.normalization_ = static_cast<double>(1.0L / bound);
    bound = 1.0L;
  }
  f.sup_bound_ = static_cast<double>(bound);
  f.label_ = "trig polynomial";
  return f;
}

Observable Observable::tensor(const Observable& f, const Observable& g) {
  Observable h;
  h.space_ = StateSpace::product(f.space_, g.space_);
  for (const auto& a : f.terms_) {
    for (const auto& b : g.terms_) {
      Frequency k = a.freq;
      k.insert(k.end(), b.freq.begin(), b.freq.end());
      h.terms_.push_back({a.coef * b.coef, std::move(k)});
    }
  }
  h.sup_bound_ = f.sup_bound_ * g.sup_bound_;
  h.label_ = f.label_ + " (x) " + g.label_;
  return h;
}

Observable Observable::from_table(const StateSpace& space, const std::vector<cplx>& values) {
  const auto n = space.cardinality();
  if (!n) throw InvalidInput("tabulated observables need a finite state space");
  if (*n > kTableBudget) throw BudgetExceeded("tabulated observable larger than " + std::to_string(kTableBudget));
  if (values.size() != *n) throw InvalidInput("table size does not match the state space");
  double sup = 0.0;
  for (auto v : values) sup = std::max(sup, std::abs(v));
  Observable f;
  f.space_ = space;
  f.normalization_ = sup > 1.0 ? 1.0 / sup : 1.0;
  std::vector<StatePoint> pts;
  for (std::uint64_t i = 0; i < *n; ++i) pts.push_back(space.point_at(i));
  for (std::uint64_t i = 0; i < *n; ++i) {
    // Frequencies range over the same index set as points (ℤ_q is self-dual).
    const Frequency& k = pts[i].coords;
    lcplx c = 0.0L;
    for (std::uint64_t j = 0; j < *n; ++j) {
      const lcplx v(values[j].real(), values[j].imag());
      c += v * expi_turns(-dot_turns(space, k, pts[j].coords.data()));
    }
    c /= static_cast<long double>(*n);
    f.terms_.push_back({c * static_cast<long double>(f.normalization_), k});
  }
  f.merge_terms();
  f.sup_bound_ = std::min(1.0, sup);
  f.label_ = "table";
  return f;
}

cplx Observable::eval(const std::uint64_t* x) const {
  lcplx s = 0.0L;
  for (const auto& t : terms_) s += t.coef * expi_turns(dot_turns(space_, t.freq, x));
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

Observable Observable::conj() const {
  Observable g = *this;
  for (auto& t : g.terms_) {
    t.coef = std::conj(t.coef);
    t.freq = negate(space_, t.freq);
  }
  return g;
}

Observable Observable::operator*(const Observable& g) const {
  if (!(space_ == g.space_)) throw InvalidInput("multiplying observables on different spaces");
  Observable h;
  h.space_ = space_;
  for (const auto& a : terms_) {
    for (const auto& b : g.terms_) h.terms_.push_back({a.coef * b.coef, add(space_, a.freq, b.freq)});
  }
  h.merge_terms();
  h.sup_bound_ = sup_bound_ * g.sup_bound_;
  h.label_ = label_ + " * " + g.label_;
  return h;
}

Observable Observable::scaled(cplx c) const {
  Observable g = *this;
  for (auto& t : g.terms_) t.coef *= lcplx(c.real(), c.imag());
  g.sup_bound_ *= std::abs(c);
  return g;
}

Frequency transpose_apply(const Transformation& t, const Frequency& k, long double* phase_turns) {
  const StateSpace& space = t.space();
  Frequency out(k.size(), 0);
  long double phase = 0.0L;
  for (std::size_t i = 0; i < t.parts().size(); ++i) {
    const AffineMap& m = t.parts()[i];
    const std::size_t off = space.offset(i);
    const std::uint64_t q = m.modulus();
    std::uint64_t kb = 0;
    for (int r = 0; r < m.dim(); ++r) kb = mod_add(kb, mod_mul(k[off + r], m.offset(r), q), q);
    phase += mod_turns(kb, q);
    for (int c = 0; c < m.dim(); ++c) {
      std::uint64_t s = 0;
      for (int r = 0; r < m.dim(); ++r) s = mod_add(s, mod_mul(m.matrix(r, c), k[off + r], q), q);
      out[off + c] = s;
    }
  }
  if (phase_turns) *phase_turns = phase;
  return out;
}

Observable Observable::compose(const Transformation& t) const {
  if (!(t.space() == space_)) throw InvalidInput("composing an observable with a map on another space");
  Observable g = *this;
  for (auto& term : g.terms_) {
    long double phase = 0.0L;
    term.freq = transpose_apply(t, term.freq, &phase);
    term.coef *= expi_turns(phase);
  }
  return g;
}

cplx Observable::mean() const {
  lcplx s = 0.0L;
  for (const auto& t : terms_) {
    if (is_zero_frequency(t.freq)) s += t.coef;
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

SpectrumMap Observable::spectrum() const {
  SpectrumMap m;
  for (const auto& t : terms_) m[t.freq] += t.coef;
  return m;
}

lcplx phase_of(const StateSpace& space, const Frequency& k, const StatePoint& x) {
  return expi_turns(dot_turns(space, k, x.coords.data()));
}

cplx spectral_integral(const std::vector<Observable>& factors) {
  if (factors.empty()) return 1.0;
  const StateSpace& space = factors.front().space();
  for (const auto& f : factors) {
    if (!(f.space() == space)) throw InvalidInput("integrating observables on different spaces");
  }
  // Fold all but the last factor into one spectrum, then pair with the last.
  std::vector<Observable::Term> acc = factors.front().terms();
  for (std::size_t i = 1; i + 1 < factors.size(); ++i) {
    SpectrumMap next;
    std::vector<Frequency> order;
    for (const auto& a : acc) {
      for (const auto& b : factors[i].terms()) {
        Frequency k = add(space, a.freq, b.freq);
        auto [it, inserted] = next.try_emplace(k, 0.0L);
        if (inserted) order.push_back(std::move(k));
        it->second += a.coef * b.coef;
      }
    }
    acc.clear();
    for (auto& k : order) acc.push_back({next[k], k});
  }
  lcplx s = 0.0L;
  if (factors.size() == 1) {
    for (const auto& a : acc) {
      if (is_zero_frequency(a.freq)) s += a.coef;
    }
  } else if (acc.size() * factors.back().terms().size() <= 64) {
    for (const auto& a : acc) {
      for (const auto& b : factors.back().terms()) {
        if (add(space, a.freq, b.freq) == Frequency(space.words(), 0)) s += a.coef * b.coef;
      }
    }
  } else {
    SpectrumMap last = factors.back().spectrum();
    for (const auto& a : acc) {
      auto it = last.find(negate(space, a.freq));
      if (it != last.end()) s += a.coef * it->second;
    }
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

IntegralEstimate integrate(const Observable& f, const CommutingSystem& system) {
  if (!(f.space() == system.space())) throw InvalidInput("observable and system live on different spaces");
  IntegralEstimate out;
  if (f.terms().size() <= 1) {
    out.value = f.mean();
    out.method = "analytic";
    return out;
  }
  const auto& pts = system.points();
  out.samples = pts.size();
  const auto sum = deterministic_sum<lcplx>(pts.size(), [&](std::size_t i) {
    const cplx v = f(pts[i]);
    return lcplx(v.real(), v.imag());
  });
  const lcplx mean = sum / static_cast<long double>(pts.size());
  out.value = {static_cast<double>(mean.real()), static_cast<double>(mean.imag())};
  if (system.exact_measure()) {
    out.method = "exact";
    return out;
  }
  const long double sq = deterministic_sum<long double>(pts.size(), [&](std::size_t i) {
    return static_cast<long double>(std::norm(f(pts[i]) - out.value));
  });
  const auto n = static_cast<long double>(pts.size());
  out.std_error = pts.size() > 1 ? static_cast<double>(std::sqrt(sq / (n - 1) / n)) : 0.0;
  out.method = "sampled";
  return out;
}

double weak_mixing_defect(const Transformation& t, const Observable& f, const Observable& g, std::int64_t n) {
  if (n < 1) throw InvalidInput("weak-mixing defect needs N >= 1");
  const cplx base = f.mean() * std::conj(g.mean());
  long double total = 0.0L;
  for (std::int64_t k = 1; k <= n; ++k) {
    const Observable gk = g.compose(t.power(k));
    total += std::abs(spectral_integral({f, gk.conj()}) - base);
  }
  return static_cast<double>(total / static_cast<long double>(n));
}

std::vector<cplx> ergodic_projection(const Observable& f, const Transformation& t, std::int64_t n,
                                     const std::vector<StatePoint>& points) {
  if (n < 1) throw InvalidInput("ergodic projection needs N >= 1");
  std::vector<cplx> out(points.size());
  for_each_chunk(points.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      StatePoint x = points[i];
      lcplx s = 0.0L;
      for (std::int64_t k = 0; k < n; ++k) {
        const cplx v = f(x);
        s += lcplx(v.real(), v.imag());
        t.apply(x.coords.data(), x.coords.data());
      }
      s /= static_cast<long double>(n);
      out[i] = {static_cast<double>(s.real()), static_cast<double>(s.imag())};
    }
  });
  return out;
}

}  // namespace ergolab

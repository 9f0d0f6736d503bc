#include "ergolab/seminorms.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

namespace {

double root(long double power, int k) {
  if (power <= 0.0L) return 0.0;
  return static_cast<double>(std::pow(power, 1.0L / static_cast<long double>(1u << k)));
}

void check_budget(long double work, const char* what) {
  if (work > static_cast<long double>(kSeminormBudget)) {
    throw BudgetExceeded(std::string(what) + " exceeds the seminorm work budget");
  }
}

// ‖b‖_level^{2^level} over the first `inner` positions at the innermost level.
long double seq_power(const std::vector<lcplx>& b, int level, int H, std::size_t inner) {
  if (level == 1) {
    lcplx s = 0.0L;
    for (std::size_t i = 0; i < inner; ++i) s += b[i];
    return std::norm(s / static_cast<long double>(inner));
  }
  const std::size_t len = b.size() - static_cast<std::size_t>(H);
  long double acc = 0.0L;
  std::vector<lcplx> c(len);
  for (int h = 1; h <= H; ++h) {
    for (std::size_t i = 0; i < len; ++i) c[i] = b[i + static_cast<std::size_t>(h)] * std::conj(b[i]);
    acc += seq_power(c, level - 1, H, inner);
  }
  return acc / static_cast<long double>(H);
}

}  // namespace

SeqSeminormReport seq_seminorm(const SequenceSample& a, const SeqSeminormConfig& cfg) {
  if (cfg.k < 1 || cfg.k > 4) throw InvalidInput("sequence seminorm step must be in [1,4]");
  if (cfg.H < 1) throw InvalidInput("shift depth H must be positive");
  const auto L = static_cast<std::int64_t>(a.values.size());
  const std::int64_t inner = L - static_cast<std::int64_t>(cfg.k - 1) * cfg.H;
  if (inner < std::max<std::int64_t>(cfg.H, 1)) {
    throw InsufficientWindow("window of length " + std::to_string(L) + " too short for k=" + std::to_string(cfg.k) +
                             ", H=" + std::to_string(cfg.H));
  }
  check_budget(std::pow(static_cast<long double>(cfg.H), cfg.k - 1) * static_cast<long double>(L),
               "sequence seminorm");
  std::vector<lcplx> b(a.values.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = {a.values[i].real(), a.values[i].imag()};

  long double power = 0.0L;
  if (cfg.k == 1) {
    power = seq_power(b, 1, cfg.H, static_cast<std::size_t>(inner));
  } else {
    // Outermost shifts in parallel, summed in index order.
    std::vector<long double> parts(static_cast<std::size_t>(cfg.H));
    const std::size_t len = b.size() - static_cast<std::size_t>(cfg.H);
    for_each_index(parts.size(), [&](std::size_t idx) {
      const std::size_t h = idx + 1;
      std::vector<lcplx> c(len);
      for (std::size_t i = 0; i < len; ++i) c[i] = b[i + h] * std::conj(b[i]);
      parts[idx] = seq_power(c, cfg.k - 1, cfg.H, static_cast<std::size_t>(inner));
    });
    for (auto p : parts) power += p;
    power /= static_cast<long double>(cfg.H);
  }
  SeqSeminormReport out;
  out.k = cfg.k;
  out.H = cfg.H;
  out.inner = {a.window.begin, a.window.begin + inner};
  // ‖a‖_1 = |mean| is the square root of the level-1 power.
  out.value = root(power, cfg.k);
  return out;
}

// ------------------------------------------------------------ finite systems

FinitePermutation FinitePermutation::of(const Transformation& t) {
  const auto n = t.space().cardinality();
  if (!n) throw InvalidInput("exact seminorms need a finite state space");
  if (*n > kEnumerationBudget) throw BudgetExceeded("state space too large for exact seminorms");
  FinitePermutation p;
  p.image.resize(*n);
  std::vector<char> hit(*n, 0);
  for (std::uint64_t i = 0; i < *n; ++i) {
    const std::uint64_t j = t.space().index_of(t.apply(t.space().point_at(i)));
    p.image[i] = static_cast<std::uint32_t>(j);
    if (hit[j]) throw InvalidInput("transformation is not a bijection of the finite space");
    hit[j] = 1;
  }
  return p;
}

std::uint64_t FinitePermutation::order() const {
  std::vector<char> seen(image.size(), 0);
  std::uint64_t l = 1;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (std::size_t j = i; !seen[j]; j = image[j]) {
      seen[j] = 1;
      ++len;
    }
    l = std::lcm(l, len);
    if (l > (std::uint64_t{1} << 40)) throw BudgetExceeded("permutation order too large");
  }
  return l;
}

FinitePermutation FinitePermutation::inverse() const {
  FinitePermutation p;
  p.image.resize(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) p.image[image[i]] = static_cast<std::uint32_t>(i);
  return p;
}

std::vector<cplx> tabulate(const Observable& f) {
  const auto n = f.space().cardinality();
  if (!n) throw InvalidInput("tabulation needs a finite state space");
  if (*n > kEnumerationBudget) throw BudgetExceeded("state space too large to tabulate");
  std::vector<cplx> v(*n);
  for_each_chunk(v.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) v[i] = f(f.space().point_at(i));
  });
  return v;
}

namespace {

long double invariant_projection_power(const std::vector<lcplx>& f, const FinitePermutation& t) {
  std::vector<char> seen(f.size(), 0);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (seen[i]) continue;
    lcplx s = 0.0L;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = t.image[j]) {
      seen[j] = 1;
      s += f[j];
      ++len;
    }
    acc += std::norm(s) / static_cast<long double>(len);
  }
  return acc / static_cast<long double>(f.size());
}

// g ∘ T
std::vector<lcplx> shift(const std::vector<lcplx>& g, const FinitePermutation& t) {
  std::vector<lcplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[t.image[i]];
  return out;
}

// |||f|||_k^{2^k}
long double hk_power(const std::vector<lcplx>& f, const FinitePermutation& t, std::uint64_t period, int k) {
  if (k == 1) return invariant_projection_power(f, t);
  std::vector<lcplx> tn = f;
  std::vector<lcplx> prod(f.size());
  long double acc = 0.0L;
  for (std::uint64_t n = 0; n < period; ++n) {
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = std::conj(f[i]) * tn[i];
    acc += hk_power(prod, t, period, k - 1);
    tn = shift(tn, t);
  }
  return acc / static_cast<long double>(period);
}

std::vector<lcplx> widen(const std::vector<cplx>& f) {
  std::vector<lcplx> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = {f[i].real(), f[i].imag()};
  return out;
}

}  // namespace

double invariant_projection_norm(const std::vector<cplx>& f, const FinitePermutation& t) {
  return static_cast<double>(std::sqrt(invariant_projection_power(widen(f), t)));
}

HKSeminormReport hk_seminorm_exact(const std::vector<cplx>& f, const FinitePermutation& t, int k) {
  if (k < 1) throw InvalidInput("seminorm step must be >= 1");
  if (f.size() != t.image.size()) throw InvalidInput("table and permutation sizes differ");
  const std::uint64_t period = t.order();
  check_budget(std::pow(static_cast<long double>(period), k - 1) * static_cast<long double>(f.size()),
               "exact Host-Kra seminorm");
  const auto g = widen(f);
  long double power = 0.0L;
  if (k == 1) {
    power = invariant_projection_power(g, t);
  } else {
    std::vector<long double> parts(period);
    for_each_index(parts.size(), [&](std::size_t n) {
      std::vector<lcplx> prod(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t j = i;
        for (std::size_t r = 0; r < n; ++r) j = t.image[j];
        prod[i] = std::conj(g[i]) * g[j];
      }
      parts[n] = hk_power(prod, t, period, k - 1);
    });
    for (auto p : parts) power += p;
    power /= static_cast<long double>(period);
  }
  HKSeminormReport out;
  out.k = k;
  out.power = static_cast<double>(std::max(power, 0.0L));
  out.value = root(power, k);
  out.method = "exact-recursive";
  out.period = static_cast<std::int64_t>(period);
  return out;
}

HKSeminormReport hk_seminorm_cube(const std::vector<cplx>& f, const FinitePermutation& t, int k) {
  if (k < 1 || k > 6) throw InvalidInput("cube seminorm step must be in [1,6]");
  if (f.size() != t.image.size()) throw InvalidInput("table and permutation sizes differ");
  const std::uint64_t period = t.order();
  const std::size_t X = f.size();
  check_budget(std::pow(static_cast<long double>(period), k) * static_cast<long double>((1u << k) * X),
               "cube Host-Kra seminorm");
  check_budget(static_cast<long double>(k) * static_cast<long double>(period) * static_cast<long double>(X),
               "cube power table");
  // pow_table[m][x] = T^m x for m < k·period.
  const std::size_t span = static_cast<std::size_t>(k) * period;
  std::vector<std::uint32_t> pow_table(span * X);
  for (std::size_t x = 0; x < X; ++x) pow_table[x] = static_cast<std::uint32_t>(x);
  for (std::size_t m = 1; m < span; ++m) {
    for (std::size_t x = 0; x < X; ++x) pow_table[m * X + x] = t.image[pow_table[(m - 1) * X + x]];
  }
  const auto g = widen(f);
  const std::size_t cubes = 1u << k;
  std::uint64_t tuples = 1;
  for (int i = 0; i < k; ++i) tuples *= period;
  // Outer index n_1 in parallel; remaining coordinates in lexicographic order.
  std::vector<lcplx> parts(period);
  for_each_index(period, [&](std::size_t n1) {
    std::uint64_t inner_tuples = tuples / period;
    std::vector<std::uint64_t> n(static_cast<std::size_t>(k), 0);
    n[0] = n1;
    lcplx acc = 0.0L;
    for (std::uint64_t r = 0; r < inner_tuples; ++r) {
      std::uint64_t rem = r;
      for (int i = k - 1; i >= 1; --i) {
        n[static_cast<std::size_t>(i)] = rem % period;
        rem /= period;
      }
      lcplx integral = 0.0L;
      for (std::size_t x = 0; x < X; ++x) {
        lcplx prod = 1.0L;
        for (std::size_t eps = 0; eps < cubes; ++eps) {
          std::size_t m = 0;
          int weight = 0;
          for (int i = 0; i < k; ++i) {
            if (eps >> i & 1u) {
              m += n[static_cast<std::size_t>(i)];
              ++weight;
            }
          }
          const lcplx v = g[pow_table[m * X + x]];
          prod *= (weight % 2) ? std::conj(v) : v;
        }
        integral += prod;
      }
      acc += integral / static_cast<long double>(X);
    }
    parts[n1] = acc;
  });
  lcplx total = 0.0L;
  for (auto p : parts) total += p;
  const long double power = total.real() / static_cast<long double>(tuples);
  HKSeminormReport out;
  out.k = k;
  out.power = static_cast<double>(std::max(power, 0.0L));
  out.value = root(power, k);
  out.method = "exact-cube";
  out.period = static_cast<std::int64_t>(period);
  return out;
}

HKSeminormReport hk_seminorm_truncated(const Observable& f, const Transformation& t, int k, std::int64_t N,
                                       std::int64_t start) {
  if (k < 1 || k > 3) throw InvalidInput("truncated seminorm step must be in [1,3]");
  if (N < 1) throw InvalidInput("truncation N must be positive");
  if (start < 0) throw InvalidInput("truncation start must be non-negative");
  const long double terms = std::pow(static_cast<long double>(N), k);
  const long double per_term = static_cast<long double>(1u << k) * static_cast<long double>(f.terms().size());
  check_budget(terms * per_term, "truncated Host-Kra seminorm");
  // g[m] = f ∘ T^m for m up to k·(start + N − 1); conjugates precomputed too.
  const std::size_t span = static_cast<std::size_t>(k * (start + N - 1) + 1);
  std::vector<Observable> g(span), gc(span);
  for_each_index(span, [&](std::size_t m) {
    g[m] = f.compose(t.power(static_cast<std::int64_t>(m)));
    gc[m] = g[m].conj();
  });
  const std::size_t cubes = 1u << k;
  std::uint64_t inner_tuples = 1;
  for (int i = 1; i < k; ++i) inner_tuples *= static_cast<std::uint64_t>(N);
  std::vector<lcplx> parts(static_cast<std::size_t>(N));
  for_each_index(parts.size(), [&](std::size_t i1) {
    std::vector<std::int64_t> n(static_cast<std::size_t>(k));
    n[0] = start + static_cast<std::int64_t>(i1);
    std::vector<Observable> factors(cubes);
    lcplx acc = 0.0L;
    for (std::uint64_t r = 0; r < inner_tuples; ++r) {
      std::uint64_t rem = r;
      for (int i = k - 1; i >= 1; --i) {
        n[static_cast<std::size_t>(i)] = start + static_cast<std::int64_t>(rem % static_cast<std::uint64_t>(N));
        rem /= static_cast<std::uint64_t>(N);
      }
      for (std::size_t eps = 0; eps < cubes; ++eps) {
        std::int64_t m = 0;
        int weight = 0;
        for (int i = 0; i < k; ++i) {
          if (eps >> i & 1u) {
            m += n[static_cast<std::size_t>(i)];
            ++weight;
          }
        }
        factors[eps] = (weight % 2) ? gc[static_cast<std::size_t>(m)] : g[static_cast<std::size_t>(m)];
      }
      const cplx v = spectral_integral(factors);
      acc += lcplx(v.real(), v.imag());
    }
    parts[i1] = acc;
  });
  lcplx total = 0.0L;
  for (auto p : parts) total += p;
  const long double power = total.real() / terms;
  HKSeminormReport out;
  out.k = k;
  out.power = static_cast<double>(std::max(power, 0.0L));
  out.value = root(power, k);
  out.method = "truncated-cube";
  return out;
}

HKSeminormReport hk_seminorm(const Observable& f, const Transformation& t, const HKSeminormConfig& cfg) {
  if (!(f.space() == t.space())) throw InvalidInput("observable and transformation live on different spaces");
  if (cfg.exact && t.space().finite()) return hk_seminorm_exact(tabulate(f), FinitePermutation::of(t), cfg.k);
  return hk_seminorm_truncated(f, t, cfg.k, cfg.N, cfg.start);
}

double InverseDirectionReport::worst_margin() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) w = std::min(w, c.margin);
  return w;
}

InverseDirectionReport hk_inverse_direction_checks(const Observable& f, const Transformation& t, int k) {
  if (!t.space().finite()) throw InvalidInput("inverse-direction checks need a finite system");
  const FinitePermutation p = FinitePermutation::of(t);
  const auto table = tabulate(f);
  const double fk = hk_seminorm_exact(table, p, k).value;
  const double fk1 = hk_seminorm_exact(table, p, k + 1).value;
  const double finv = hk_seminorm_exact(table, p.inverse(), k).value;

  const Transformation tt = Transformation::product({t, t});
  const Observable ff = Observable::tensor(f, f.conj());
  const double prod = hk_seminorm_exact(tabulate(ff), FinitePermutation::of(tt), k).value;

  InverseDirectionReport out;
  out.k = k;
  out.checks.push_back({"product", prod, fk1 * fk1, fk1 * fk1 - prod, false});
  out.checks.push_back({"monotone", fk, fk1, fk1 - fk, false});
  out.checks.push_back({"inverse", fk, finv, -std::abs(finv - fk), true});
  return out;
}

}  // namespace ergolab

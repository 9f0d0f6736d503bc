#include "ergolab/suspension.hpp"

#include <bit>
#include <cmath>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

SuspensionFlow::SuspensionFlow(CommutingSystem system, std::size_t m) : system_(std::move(system)), m_(m) {
  if (m_ < 1) throw InvalidInput("suspension needs m >= 1");
  if (system_.size() < 1) throw InvalidInput("suspension needs at least one transformation");
}

SuspensionPoint SuspensionFlow::apply(const std::vector<FixedReal>& s, const SuspensionPoint& pt) const {
  if (s.size() != directions() || pt.heights.size() != directions()) {
    throw InvalidInput("flow time and heights need one entry per direction (i, j)");
  }
  SuspensionPoint out;
  out.heights.resize(directions());
  std::vector<std::int64_t> exponent(ell(), 0);
  for (std::size_t i = 0; i < ell(); ++i) {
    for (std::size_t j = 0; j < m_; ++j) {
      const std::size_t d = i * m_ + j;
      const FixedReal t = s[d] + FixedReal::from_fraction_bits(pt.heights[d]);
      exponent[i] += t.floor();
      out.heights[d] = t.frac_bits();
    }
  }
  out.base = pt.base;
  for (std::size_t i = 0; i < ell(); ++i) {
    if (exponent[i] != 0) out.base = system_.map(i).power(exponent[i]).apply(out.base);
  }
  return out;
}

SuspensionPoint flow_apply(const SuspensionFlow& flow, const std::vector<FixedReal>& s, const SuspensionPoint& pt) {
  return flow.apply(s, pt);
}

FlowPowerReport flow_power_identity_check(const Transformation& t, FixedReal s, const StatePoint& x,
                                          std::uint64_t b, std::int64_t n_max, const Observable& f) {
  if (n_max < 1) throw InvalidInput("n_max must be positive");
  FlowPowerReport report;
  // Iterated S(x, b) = (T^{[s+b]}x, {s+b}).
  StatePoint base = x;
  std::uint64_t height = b;
  StatePoint base0 = x;  // iterates of S from (x, 0)
  std::uint64_t height0 = 0;
  const FixedReal bb = FixedReal::from_fraction_bits(b);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const FixedReal step = s + FixedReal::from_fraction_bits(height);
    base = t.power(step.floor()).apply(base);
    height = step.frac_bits();
    const FixedReal step0 = s + FixedReal::from_fraction_bits(height0);
    base0 = t.power(step0.floor()).apply(base0);
    height0 = step0.frac_bits();

    const FixedReal ns = s.times(n) + bb;
    const StatePoint closed = t.power(ns.floor()).apply(x);
    ++report.checked;
    if (!(closed == base) || ns.frac_bits() != height) {
      ++report.mismatches;
      if (!report.first_mismatch) report.first_mismatch = n;
    }
    const StatePoint closed0 = t.power(s.times(n).floor()).apply(x);
    if (f(base0) != f(closed0)) {
      ++report.observable_mismatches;
      if (!report.first_mismatch) report.first_mismatch = n;
    }
  }
  return report;
}

std::int64_t floor_reciprocal(FixedReal s) {
  if (s.raw() <= 0) throw InvalidInput("s must be positive");
  // s = r / 2^64, so ⌊1/s⌋ = ⌊2^64 / r⌋.
  const uint128 r = static_cast<uint128>(s.raw());
  const uint128 inv = (static_cast<uint128>(1) << 64) / r;
  if (inv > static_cast<uint128>(INT64_MAX)) throw HeadroomError("1/s too large");
  return static_cast<std::int64_t>(inv);
}

LemmaF5Report lemma_f5_check(const std::vector<double>& a, std::int64_t extent, FixedReal s, int k, Window window) {
  if (k < 1 || k > 3) throw InvalidInput("lemma F5 check supports k in [1,3]");
  if (s.raw() <= 0) throw InvalidInput("s must be positive");
  if (window.begin < 0 || window.length() < 1) throw InvalidInput("window must be non-empty and non-negative");
  std::uint64_t cells = 1;
  for (int i = 0; i < k; ++i) cells *= static_cast<std::uint64_t>(extent);
  if (a.size() != cells) throw InvalidInput("array size does not match extent^k");
  for (double v : a) {
    if (!(v >= 0.0)) throw InvalidInput("lemma F5 needs a non-negative array");
  }
  const std::int64_t W = window.length();
  if (std::pow(static_cast<long double>(W), k) > static_cast<long double>(kSeminormBudget)) {
    throw BudgetExceeded("lemma F5 window too large for this k");
  }
  std::vector<std::int64_t> idx(static_cast<std::size_t>(W));
  for (std::int64_t n = 0; n < W; ++n) idx[static_cast<std::size_t>(n)] = s.times(window.begin + n).floor();
  const std::int64_t lo = idx.front();
  const std::int64_t hi = idx.back();
  if (hi >= extent) throw InsufficientWindow("array extent does not cover [(N-1)s]");

  auto cell = [&](const std::int64_t* c) {
    std::uint64_t off = 0;
    for (int i = 0; i < k; ++i) off = off * static_cast<std::uint64_t>(extent) + static_cast<std::uint64_t>(c[i]);
    return static_cast<long double>(a[off]);
  };
  // lhs: outer coordinate in parallel.
  std::vector<long double> parts(static_cast<std::size_t>(W));
  for_each_index(parts.size(), [&](std::size_t i0) {
    std::int64_t c[3] = {idx[i0], 0, 0};
    long double acc = 0.0L;
    if (k == 1) {
      acc = cell(c);
    } else {
      for (std::int64_t i1 = 0; i1 < W; ++i1) {
        c[1] = idx[static_cast<std::size_t>(i1)];
        if (k == 2) {
          acc += cell(c);
        } else {
          for (std::int64_t i2 = 0; i2 < W; ++i2) {
            c[2] = idx[static_cast<std::size_t>(i2)];
            acc += cell(c);
          }
        }
      }
    }
    parts[i0] = acc;
  });
  long double lhs_sum = 0.0L;
  for (auto p : parts) lhs_sum += p;

  // Sum of a over the image box [lo, hi]^k.
  const std::int64_t B = hi - lo + 1;
  long double box_sum = 0.0L;
  std::int64_t c[3] = {0, 0, 0};
  std::uint64_t box_cells = 1;
  for (int i = 0; i < k; ++i) box_cells *= static_cast<std::uint64_t>(B);
  for (std::uint64_t r = 0; r < box_cells; ++r) {
    std::uint64_t rem = r;
    for (int i = k - 1; i >= 0; --i) {
      c[i] = lo + static_cast<std::int64_t>(rem % static_cast<std::uint64_t>(B));
      rem /= static_cast<std::uint64_t>(B);
    }
    box_sum += cell(c);
  }
  const long double fi = static_cast<long double>(floor_reciprocal(s) + 1);
  const long double Wk = std::pow(static_cast<long double>(W), k);
  const long double mult = std::pow(fi, k);
  LemmaF5Report out;
  out.lhs = static_cast<double>(lhs_sum / Wk);
  out.rhs = static_cast<double>(mult * box_sum / Wk);
  out.rhs_limit = static_cast<double>(std::pow(s.to_long_double(), k) * mult * box_sum / static_cast<long double>(box_cells));
  out.margin = out.rhs - out.lhs;
  return out;
}

LemmaF6Constants lemma_f6_constants(int k, FixedReal s) {
  if (k < 1 || k > 5) throw InvalidInput("lemma F6 constants need k in [1,5]");
  LemmaF6Constants c;
  c.floor_inv_s = floor_reciprocal(s);
  c.c_k = std::pow(static_cast<long double>(k + 1), static_cast<long double>(1u << k));
  c.c_ks = c.c_k * std::pow(s.to_long_double(), k) * std::pow(static_cast<long double>(c.floor_inv_s + 1), k);
  return c;
}

std::optional<int> dyadic_bits(FixedReal s, int max_bits) {
  const std::uint64_t f = s.frac_bits();
  if (f == 0) return 0;
  const int j = 64 - std::countr_zero(f);
  if (j > max_bits) return std::nullopt;
  return j;
}

LemmaF6Report lemma_f6_numeric_check(const Observable& f, const Transformation& t, FixedReal s, int k) {
  if (s.raw() <= 0) throw InvalidInput("s must be positive");
  const auto J = dyadic_bits(s);
  if (!J) throw InvalidInput("s must be a dyadic rational with at most 16 fractional bits");
  const FinitePermutation base = FinitePermutation::of(t);
  const auto table = tabulate(f);
  const std::size_t X = table.size();
  const std::uint64_t H = std::uint64_t{1} << *J;
  if (X * H > kEnumerationBudget) throw BudgetExceeded("finite suspension too large");
  const std::int64_t sigma = static_cast<std::int64_t>(s.raw() >> (64 - *J));  // s · 2^J

  // T^c on point indices, for the carries that occur.
  const std::int64_t max_carry = (static_cast<std::int64_t>(H) - 1 + sigma) >> *J;
  std::vector<std::vector<std::uint32_t>> tpow(static_cast<std::size_t>(max_carry + 1));
  tpow[0].resize(X);
  for (std::size_t x = 0; x < X; ++x) tpow[0][x] = static_cast<std::uint32_t>(x);
  for (std::int64_t c = 1; c <= max_carry; ++c) {
    tpow[static_cast<std::size_t>(c)].resize(X);
    for (std::size_t x = 0; x < X; ++x) {
      tpow[static_cast<std::size_t>(c)][x] = base.image[tpow[static_cast<std::size_t>(c - 1)][x]];
    }
  }
  FinitePermutation S;
  S.image.resize(X * H);
  std::vector<cplx> lifted(X * H);
  for (std::size_t x = 0; x < X; ++x) {
    for (std::uint64_t beta = 0; beta < H; ++beta) {
      const std::uint64_t moved = beta + static_cast<std::uint64_t>(sigma);
      const std::uint64_t carry = moved >> *J;
      const std::uint64_t nb = moved & (H - 1);
      S.image[x * H + beta] = static_cast<std::uint32_t>(tpow[carry][x] * H + nb);
      lifted[x * H + beta] = table[x];
    }
  }
  LemmaF6Report out;
  out.height_bits = *J;
  out.constants = lemma_f6_constants(k, s);
  out.lhs = hk_seminorm_exact(lifted, S, k).value;
  out.seminorm = hk_seminorm_exact(table, base, k + 1).value;
  out.rhs = static_cast<double>(out.constants.c_ks * out.seminorm);
  out.margin = out.rhs - out.lhs;
  return out;
}

namespace {

// Probability of a carry [p + b] = [p] + 1 for b uniform in [0, δ], per direction.
struct CarryData {
  std::vector<std::vector<std::int64_t>> floors;
  std::vector<std::size_t> active;    // directions (row-major) that can carry
  std::vector<long double> weight;    // carry probability per active direction
};

CarryData carry_data(const CorrelationSpec& spec, std::int64_t n, FixedReal delta, int grid_bits) {
  if (delta.raw() <= 0 || delta >= FixedReal::from_int(1)) throw InvalidInput("delta must lie in (0,1)");
  CarryData cd;
  const std::size_t m = spec.m();
  cd.floors.assign(spec.ell(), std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < spec.ell(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const FloorFrac ff = eval_floor_frac(spec.iterates[i][j], n);
      cd.floors[i][j] = ff.floor;
      const FixedReal over = delta + ff.frac - FixedReal::from_int(1);
      if (over.raw() <= 0) continue;  // cannot reach the next integer inside the box
      long double w;
      if (grid_bits == 0) {
        w = over.to_long_double() / delta.to_long_double();
      } else {
        // Midpoints (g + 1/2) δ / 2^bits with g < 2^bits; count those ≥ 1 − {p}.
        const std::uint64_t G = std::uint64_t{1} << grid_bits;
        std::uint64_t hits = 0;
        const FixedReal need = FixedReal::from_int(1) - ff.frac;
        for (std::uint64_t g = 0; g < G; ++g) {
          const int128 raw = (delta.raw() * static_cast<int128>(2 * g + 1)) >> (grid_bits + 1);
          if (FixedReal::from_raw(raw) >= need) ++hits;
        }
        w = static_cast<long double>(hits) / static_cast<long double>(G);
      }
      if (w > 0) {
        cd.active.push_back(i * m + j);
        cd.weight.push_back(w);
      }
    }
  }
  if (cd.active.size() > 12) throw BudgetExceeded("too many directions near a carry for exact box integration");
  return cd;
}

cplx box_average(const CorrelationSpec& spec, const CarryData& cd) {
  const std::size_t m = spec.m();
  const std::size_t r = cd.active.size();
  lcplx acc = 0.0L;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    long double w = 1.0L;
    auto e = cd.floors;
    for (std::size_t a = 0; a < r; ++a) {
      if (mask >> a & 1u) {
        w *= cd.weight[a];
        e[cd.active[a] / m][cd.active[a] % m] += 1;
      } else {
        w *= 1.0L - cd.weight[a];
      }
    }
    if (w == 0.0L) continue;
    const cplx v = correlation_for_exponents(spec, e);
    acc += w * lcplx(v.real(), v.imag());
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

}  // namespace

cplx delta_box_average(const CorrelationSpec& spec, std::int64_t n, FixedReal delta) {
  return box_average(spec, carry_data(spec, n, delta, 0));
}

cplx delta_box_average_grid(const CorrelationSpec& spec, std::int64_t n, FixedReal delta, int bits) {
  if (bits < 1 || bits > 16) throw InvalidInput("grid bits must be in [1,16]");
  return box_average(spec, carry_data(spec, n, delta, bits));
}

WeakAntiUniformBound weak_anti_uniform_bound(const CorrelationSpec& spec, const SequenceSample& b, FixedReal delta,
                                             int k, int H) {
  spec.validate();
  const Window w = b.window;
  const SequenceSample a = corr_seq(spec, w);
  std::vector<cplx> box(b.values.size());
  for_each_chunk(box.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) box[i] = delta_box_average(spec, w.begin + static_cast<std::int64_t>(i), delta);
  });
  const auto len = static_cast<long double>(box.size());
  const lcplx ab = deterministic_sum<lcplx>(box.size(), [&](std::size_t i) {
    const cplx v = a.values[i] * b.values[i];
    return lcplx(v.real(), v.imag());
  }) / len;
  const lcplx tb = deterministic_sum<lcplx>(box.size(), [&](std::size_t i) {
    const cplx v = box[i] * b.values[i];
    return lcplx(v.real(), v.imag());
  }) / len;
  double sup_b = 0.0;
  for (auto v : b.values) sup_b = std::max(sup_b, std::abs(v));

  WeakAntiUniformBound out;
  out.delta = delta;
  out.lhs = static_cast<double>(std::abs(ab));
  out.box_term = static_cast<double>(std::abs(tb));
  double dens = 0.0;
  for (std::size_t i = 0; i < spec.ell(); ++i) {
    for (std::size_t j = 0; j < spec.m(); ++j) {
      const double d = frac_density(spec.iterates[i][j], delta, w).density;
      out.densities.push_back(d);
      dens += d;
    }
  }
  out.c_delta = 2.0 * sup_b * dens;
  out.rhs = out.box_term + out.c_delta;
  out.margin = out.rhs - out.lhs;
  out.b_uniformity = seq_seminorm(b, {k, H}).value;
  if (out.b_uniformity > 1e-12) {
    const long double dl = std::pow(delta.to_long_double(), static_cast<long double>(spec.ell() * spec.m()));
    out.C_delta = out.box_term / out.b_uniformity;
    out.empirical_C = static_cast<double>(dl * out.box_term / out.b_uniformity);
  }
  return out;
}

}  // namespace ergolab

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "ergolab/decomp.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/nil.hpp"
#include "ergolab/pet.hpp"
#include "ergolab/scenarios.hpp"
#include "ergolab/seminorms.hpp"
#include "ergolab/suspension.hpp"
#include "oracles.hpp"

using namespace ergolab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) {
    if (pass) detail += (detail.empty() ? "" : "; ") + s;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

FixedReal R(const char* s) { return parse_real(s).value; }

cplx turns(std::uint64_t bits) { return std::polar(1.0, 2.0 * M_PI * std::ldexp(static_cast<double>(bits), -64)); }

StatePoint random_point(const StateSpace& s, std::mt19937_64& rng) {
  StatePoint x{std::vector<std::uint64_t>(s.words())};
  for (std::size_t w = 0; w < s.words(); ++w) {
    const auto q = s.word_modulus(w);
    x.coords[w] = q == 0 ? rng() : rng() % q;
  }
  return x;
}

// Runs one timed sub-check of criterion 1.
void timed(Outcome& out, const std::string& name, const std::function<bool()>& body) {
  const auto t0 = Clock::now();
  const bool ok = body();
  const double s = seconds_since(t0);
  out.require(ok, name);
  out.require(s < 1.0, name + " took " + fmt(s) + " s");
}

// ---------------------------------------------------------------- 1

Outcome exact_identities() {
  Outcome out;
  std::mt19937_64 rng(101);
  timed(out, "floor identity", [&] {
    for (int i = 0; i < 100000; ++i) {
      const auto x = FixedReal::from_raw(static_cast<int128>(static_cast<std::int64_t>(rng())) << 8);
      const auto y = FixedReal::from_raw(static_cast<int128>(static_cast<std::int64_t>(rng())) << 8);
      if ((x + y.frac()).floor() + y.floor() != (x + y).floor()) return false;
    }
    return true;
  });
  timed(out, "flow law", [&] {
    const StateSpace t2 = StateSpace::torus(2);
    const SuspensionFlow flow(CommutingSystem(t2, {Transformation::automorphism({{2, 1}, {1, 1}}),
                                                   Transformation::automorphism({{5, 3}, {3, 2}})},
                                              Sampler::lattice(2)),
                              2);
    auto time = [&] { return FixedReal::from_raw(static_cast<int128>(static_cast<std::int64_t>(rng())) * 8); };
    for (int i = 0; i < 1000; ++i) {
      const SuspensionPoint p{StatePoint{{rng(), rng()}}, {rng(), rng(), rng(), rng()}};
      std::vector<FixedReal> s, t, st;
      for (int d = 0; d < 4; ++d) {
        s.push_back(time());
        t.push_back(time());
        st.push_back(s.back() + t.back());
      }
      if (!(flow.apply(s, flow.apply(t, p)) == flow.apply(st, p))) return false;
    }
    return true;
  });
  timed(out, "time-s map powers", [&] {
    const StateSpace t2 = StateSpace::torus(2);
    const auto r = flow_power_identity_check(Transformation::automorphism({{2, 1}, {1, 1}}), R("sqrt2"),
                                             StatePoint{{rng(), rng()}}, R("1/3").frac_bits(), 10000,
                                             Observable::character(t2, {1, -2}));
    return r.ok() && r.checked == 10000;
  });
  timed(out, "heisenberg powers", [&] {
    const auto g = HeisenbergElement::make(R("sqrt2"), R("-7/3"), R("phi"));
    HeisenbergElement acc;
    for (int n = 1; n <= 1000; ++n) {
      acc = acc * g;
      if (!(heisenberg_pow(g, n) == acc)) return false;
    }
    return heisenberg_pow(g, -1000) == acc.inverse();
  });
  timed(out, "power laws", [&] {
    const Transformation cat = Transformation::automorphism({{2, 1}, {1, 1}});
    const Transformation cat2 = Transformation::automorphism({{5, 3}, {3, 2}});
    const Transformation mod = Transformation::modular_automorphism(24, {{1, 1}, {0, 1}});
    const Transformation rot = Transformation::rotation({R("sqrt3"), R("phi")});
    std::uniform_int_distribution<std::int64_t> ex(-100000, 100000);
    for (const Transformation* t : {&cat, &mod, &rot}) {
      for (int i = 0; i < 500; ++i) {
        const auto a = ex(rng), b = ex(rng);
        const StatePoint x = random_point(t->space(), rng);
        if (!(power_apply(*t, a + b, x) == power_apply(*t, a, power_apply(*t, b, x)))) return false;
        if (!(power_apply(*t, -a, power_apply(*t, a, x)) == x)) return false;
      }
    }
    for (int i = 0; i < 500; ++i) {
      const auto a = ex(rng), b = ex(rng);
      const StatePoint x = random_point(cat.space(), rng);
      if (!(power_apply(cat, a, power_apply(cat2, b, x)) == power_apply(cat2, b, power_apply(cat, a, x)))) return false;
    }
    return true;
  });
  out.note("5 identity families exact, each under 1 s");
  return out;
}

// ---------------------------------------------------------------- 2

Outcome oracle_equivalence() {
  Outcome out;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::int64_t> num(-9, 9), den(1, 5);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  double worst = 0.0;
  std::size_t compared = 0;

  // Correlation sequences: an affine map and its square on (ℤ_q)^d.
  for (std::int64_t q : {5, 7, 12, 16, 24}) {
    for (int d : {1, 2}) {
      for (int trial = 0; trial < 2; ++trial) {
        const std::vector<std::vector<std::int64_t>> A =
            d == 1 ? std::vector<std::vector<std::int64_t>>{{1}} : std::vector<std::vector<std::int64_t>>{{1, 1}, {0, 1}};
        std::vector<std::int64_t> b(static_cast<std::size_t>(d), 0);
        b[0] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q - 1));
        const StateSpace space = StateSpace::cyclic(static_cast<std::uint64_t>(q), d);
        const Transformation T(space, {AffineMap::translation(static_cast<std::uint64_t>(q),
                                                              std::vector<std::uint64_t>(b.begin(), b.end()))
                                           .compose(AffineMap::linear(static_cast<std::uint64_t>(q), A))});
        oracle::ModMap base{q, A, b}, base_sq{q, A, b};
        if (d == 2) {
          base_sq.A = {{1, 2}, {0, 1}};
          base_sq.b = {(2 * b[0] + b[1]) % q, (2 * b[1]) % q};
        } else {
          base_sq.b = {(2 * b[0]) % q};
        }
        std::vector<std::vector<std::vector<oracle::Frac>>> grid(2, std::vector<std::vector<oracle::Frac>>(2));
        std::vector<std::vector<RealPolynomial>> iter(2, std::vector<RealPolynomial>(2));
        for (std::size_t i = 0; i < 2; ++i) {
          for (std::size_t j = 0; j < 2; ++j) {
            std::vector<Coefficient> cs;
            const int deg = static_cast<int>(rng() % 4);
            for (int c = 0; c <= deg; ++c) {
              const auto nu = num(rng), de = den(rng);
              grid[i][j].push_back({nu, de});
              cs.push_back(Coefficient::rational(nu, de));
            }
            iter[i][j] = RealPolynomial(cs);
          }
        }
        const oracle::FiniteSystem X(q, d);
        CorrelationSpec spec;
        spec.system = CommutingSystem(space, {T, T.power(2)});
        spec.iterates = iter;
        std::vector<oracle::PointFn> fs;
        for (int j = 0; j < 3; ++j) {
          std::vector<cplx> tab(X.points.size());
          for (auto& v : tab) v = {u(rng), u(rng)};
          spec.observables.push_back(Observable::from_table(space, tab));
          fs.push_back([&X, tab](const std::vector<std::int64_t>& x) { return tab[X.index(x)]; });
        }
        const SequenceSample a = corr_seq(spec, {-10, 30});
        for (std::int64_t n = -10; n < 30; ++n) {
          const cplx want = oracle::correlation(X, {base, base_sq}, grid, fs, n);
          worst = std::max(worst, std::abs(a.at(n) - want) / std::max(1.0, std::abs(want)));
          ++compared;
        }
      }
    }
  }
  out.require(worst <= 1e-12, "corr_seq relative error " + fmt(worst));

  // Host-Kra seminorms and ergodic projections on finite maps.
  double worst_hk = 0.0, worst_proj = 0.0;
  const std::vector<Transformation> maps{
      Transformation::cyclic_shift(12, 1),  Transformation::cyclic_shift(24, 5),
      Transformation::cyclic_shift(20, 4),  Transformation::cyclic_shift(9, 3),
      Transformation::modular_automorphism(5, {{2, 1}, {1, 1}}), Transformation::modular_automorphism(4, {{1, 1}, {0, 1}})};
  for (const auto& t : maps) {
    const auto card = *t.space().cardinality();
    std::vector<cplx> table(card);
    for (auto& v : table) v = {u(rng), u(rng)};
    const Observable f = Observable::from_table(t.space(), table);
    const auto tab = tabulate(f);
    const FinitePermutation p = FinitePermutation::of(t);
    const std::vector<std::size_t> perm(p.image.begin(), p.image.end());
    for (int k = 1; k <= 3; ++k) {
      const double want = std::pow(std::max(0.0, oracle::hk_power(tab, perm, k)), 1.0 / (1 << k));
      const double got = hk_seminorm(f, t, {k}).value;
      worst_hk = std::max(worst_hk, std::abs(got - want) / std::max(1.0, want));
    }
    const auto pts = Sampler::enumerate().points(t.space());
    for (std::int64_t N : {1, 7, 60, 301}) {
      const auto got = ergodic_projection(f, t, N, pts);
      const auto want = oracle::birkhoff(tab, perm, N);
      for (std::size_t x = 0; x < got.size(); ++x) {
        worst_proj = std::max(worst_proj, std::abs(got[x] - want[x]) / std::max(1.0, std::abs(want[x])));
      }
    }
  }
  out.require(worst_hk <= 1e-12, "hk_seminorm relative error " + fmt(worst_hk));
  out.require(worst_proj <= 1e-12, "ergodic_projection relative error " + fmt(worst_proj));
  const double s = seconds_since(t0);
  out.require(s <= 30.0, "runtime " + fmt(s) + " s");
  out.note(std::to_string(compared) + " correlations, worst relative errors " + fmt(worst) + " / " + fmt(worst_hk) +
           " / " + fmt(worst_proj) + ", " + fmt(s) + " s");
  return out;
}

// ---------------------------------------------------------------- 3

Outcome calibration() {
  Outcome out;
  const StateSpace z = StateSpace::cyclic(12);
  const Transformation shift = Transformation::cyclic_shift(12, 1);
  for (const cplx c : {cplx(0.5), cplx(0.3, -0.4), cplx(-1.0), cplx(0.0)}) {
    for (int k = 1; k <= 3; ++k) {
      const double v = hk_seminorm(Observable::constant(z, c), shift, {k}).value;
      out.require(v == std::abs(c), "constant " + fmt(std::abs(c)) + " at k=" + std::to_string(k) + " gave " + fmt(v));
    }
  }
  const Observable chi = Observable::residue_character(12, 1);
  const double k1 = hk_seminorm(chi, shift, {1}).value;
  const double k2 = hk_seminorm(chi, shift, {2}).value;
  out.require(k1 <= 1e-12, "|||chi|||_1 = " + fmt(k1));
  out.require(std::abs(k2 - 1.0) <= 1e-12, "|||chi|||_2 = " + fmt(k2));

  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 1e300;
  const std::vector<Transformation> maps{shift, Transformation::cyclic_shift(8, 2), Transformation::cyclic_shift(18, 3),
                                         Transformation::modular_automorphism(3, {{2, 1}, {1, 1}})};
  for (const auto& t : maps) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<cplx> table(*t.space().cardinality());
      for (auto& v : table) v = {u(rng), u(rng)};
      for (int k = 1; k <= 2; ++k) {
        worst = std::min(worst, hk_inverse_direction_checks(Observable::from_table(t.space(), table), t, k).worst_margin());
      }
    }
  }
  worst = std::min(worst, hk_inverse_direction_checks(chi, shift, 2).worst_margin());
  out.require(worst >= -1e-9, "monotonicity/inverse margin " + fmt(worst));
  out.note("constants exact, chi: " + fmt(k1) + " and 1" + (k2 == 1.0 ? "" : "+" + fmt(k2 - 1.0)) + ", worst margin " + fmt(worst));
  return out;
}

// ---------------------------------------------------------------- 4

Outcome equidistribution() {
  Outcome out;
  const Window w{1, 100001};
  double worst = 0.0;
  for (const auto& p : {RealPolynomial::from_fixed({FixedReal(), R("sqrt2")}),
                        RealPolynomial::from_fixed({FixedReal(), FixedReal(), R("sqrt2")})}) {
    for (const char* d : {"0.2", "0.1", "0.05"}) {
      const double delta = R(d).to_double();
      const auto r = frac_density(p, R(d), w);
      const double rel = std::abs(r.density - delta) / delta;
      worst = std::max(worst, rel);
      out.require(rel <= 0.15, p.to_string() + " delta " + d + " density " + fmt(r.density));
    }
  }
  // Rational coefficients: periodic, and every full period has the same count.
  const RealPolynomial rat({Coefficient::rational(1, 3), Coefficient::rational(2, 7), Coefficient::rational(5, 6)});
  for (const char* d : {"0.2", "0.1", "0.05"}) {
    const auto r = frac_density(rat, R(d), w);
    out.require(r.periodic && r.period > 0, "rational case not detected as periodic");
    if (!r.periodic || r.period <= 0) continue;
    for (std::int64_t start : {0, 5, 1000}) {
      const auto one = frac_density(rat, R(d), {start, start + r.period});
      const auto many = frac_density(rat, R(d), {start, start + 17 * r.period});
      out.require(one.count == r.period_count && many.count == 17 * r.period_count, "rational period counts differ");
    }
  }
  out.note("worst relative deviation " + fmt(worst) + " (limit 0.15)");
  return out;
}

// ---------------------------------------------------------------- 5

const fs::path kConfigs = ERGOLAB_CONFIG_DIR;

Outcome zero_limit() {
  Outcome out;
  const auto t0 = Clock::now();
  const RunReport rep = run_scenario(ExperimentConfig::load(kConfigs / "zero_limit_cat.json"));
  const double s = seconds_since(t0);
  std::string vals;
  for (const auto& c : rep.checks) {
    out.require(c.pass, c.name + " (" + fmt(c.value) + " vs " + fmt(c.bound) + ")");
    vals += (vals.empty() ? "" : ", ") + fmt(c.value);
  }
  out.require(rep.checks.size() >= 2, "expected a bound check and a decrease check");
  out.require(s <= 60.0, "runtime " + fmt(s) + " s");
  out.note("L2 at 1e4 and 2e4: " + vals + ", " + fmt(s) + " s");
  return out;
}

// ---------------------------------------------------------------- 6

Outcome inequality_suite() {
  Outcome out;
  std::mt19937_64 rng(20240606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double w5 = 1e300, w6 = 1e300, wv = 1e300, wa = 1e300;
  for (int c = 0; c < 50; ++c) {
    // Lemma F5: random non-negative arrays, random s and window.
    {
      const int k = 1 + c % 3;
      const FixedReal s = FixedReal::from_raw(static_cast<int128>(rng() % (std::uint64_t{3} << 62)) +
                                              (static_cast<int128>(1) << 60));
      const std::int64_t begin = static_cast<std::int64_t>(rng() % 20);
      const std::int64_t len = k == 3 ? 5 + static_cast<std::int64_t>(rng() % 16) : 5 + static_cast<std::int64_t>(rng() % 60);
      const std::int64_t extent = s.times(begin + len - 1).floor() + 2;
      std::vector<double> a(static_cast<std::size_t>(std::pow(extent, k)));
      for (auto& v : a) v = u(rng) < 0.3 ? 0.0 : u(rng);
      w5 = std::min(w5, lemma_f5_check(a, extent, s, k, {begin, begin + len}).margin);
    }
    // Lemma F6: random observables on finite shifts, dyadic s.
    {
      const std::uint64_t q = 3 + rng() % 12;
      const StateSpace z = StateSpace::cyclic(q);
      std::vector<cplx> tab(q);
      for (auto& v : tab) v = std::polar(u(rng), 2 * M_PI * u(rng));
      const FixedReal s = FixedReal::from_ratio(static_cast<std::int64_t>(1 + rng() % 24), 8);
      const int k = 1 + static_cast<int>(rng() % 2);
      const auto r = lemma_f6_numeric_check(Observable::from_table(z, tab),
                                            Transformation::cyclic_shift(q, static_cast<std::int64_t>(1 + rng() % (q - 1))), s, k);
      w6 = std::min(w6, r.margin);
    }
    // van der Corput: noisy rotations in ℂ^D.
    {
      const std::size_t D = 1 + rng() % 3;
      const int H = 8 + static_cast<int>(rng() % 57);
      const std::size_t L = 3000 + rng() % 9000;
      const double theta = u(rng), noise = u(rng), bias = u(rng) < 0.3 ? 0.5 : 0.0;
      std::vector<std::vector<cplx>> v(L, std::vector<cplx>(D));
      for (std::size_t n = 0; n < L; ++n) {
        for (std::size_t i = 0; i < D; ++i) {
          v[n][i] = bias + std::polar(1.0, 2 * M_PI * theta * static_cast<double>(n * (i + 1))) +
                    noise * cplx(u(rng) - 0.5, u(rng) - 0.5);
        }
      }
      wv = std::min(wv, vdc_numeric_check(v, H).margin);
    }
    // Weak anti-uniformity: a rotation correlation against assorted b.
    {
      const StateSpace t1 = StateSpace::torus(1);
      CorrelationSpec spec;
      spec.system = CommutingSystem(t1, {Transformation::rotation({FixedReal::from_fraction_bits(rng())})}, Sampler::lattice(4));
      const int deg = 1 + static_cast<int>(rng() % 2);
      std::vector<FixedReal> coef(static_cast<std::size_t>(deg + 1));
      coef.back() = FixedReal::from_raw(static_cast<int128>(rng() >> 2) + (static_cast<int128>(1) << 62));
      spec.iterates = {{RealPolynomial::from_fixed(coef)}};
      spec.observables = {Observable::character(t1, {-1}), Observable::character(t1, {1})};
      const Window w{0, 1500};
      const SequenceSample a = corr_seq(spec, w);
      SequenceSample b = a;
      const int kind = static_cast<int>(rng() % 3);
      const double phase = u(rng);
      for (std::size_t n = 0; n < b.values.size(); ++n) {
        if (kind == 0) b.values[n] = std::conj(a.values[n]);
        if (kind == 1) b.values[n] = (rng() & 1) ? 1.0 : -1.0;
        if (kind == 2) b.values[n] = std::polar(1.0, 2 * M_PI * phase * static_cast<double>(n));
      }
      const FixedReal delta = FixedReal::from_ratio(static_cast<std::int64_t>(1 + rng() % 6), 20);
      wa = std::min(wa, weak_anti_uniform_bound(spec, b, delta, 2, 8).margin);
    }
  }
  out.require(w5 >= -1e-6, "F5 margin " + fmt(w5));
  out.require(w6 >= -1e-6, "F6 margin " + fmt(w6));
  out.require(wv >= -1e-6, "vdC margin " + fmt(wv));
  out.require(wa >= -1e-6, "anti-uniform margin " + fmt(wa));

  // c_δ along δ = 0.2, 0.1, 0.05 for the equidistributed iterate √2 n.
  const StateSpace t1 = StateSpace::torus(1);
  CorrelationSpec spec;
  spec.system = CommutingSystem(t1, {Transformation::rotation({R("sqrt3")})}, Sampler::lattice(4));
  spec.iterates = {{RealPolynomial::from_fixed({FixedReal(), R("sqrt2")})}};
  spec.observables = {Observable::character(t1, {-1}), Observable::character(t1, {1})};
  SequenceSample b = corr_seq(spec, {0, 20000});
  for (auto& v : b.values) v = std::conj(v);
  std::vector<double> cd;
  for (const char* d : {"0.2", "0.1", "0.05"}) cd.push_back(weak_anti_uniform_bound(spec, b, R(d), 2, 8).c_delta);
  out.require(cd[0] > cd[1] && cd[1] > cd[2], "c_delta not strictly decreasing");
  out.note("worst margins F5 " + fmt(w5) + ", F6 " + fmt(w6) + ", vdC " + fmt(wv) + ", anti-uniform " + fmt(wa) +
           "; c_delta " + fmt(cd[0]) + " > " + fmt(cd[1]) + " > " + fmt(cd[2]));
  return out;
}

// ---------------------------------------------------------------- 7

NilBasis fejer_rung(int K) {
  BasisRequest req;
  req.frequencies = {R("sqrt2"), R("sqrt6")};
  req.orders = {K, 1};
  req.smooth = {true, false};
  return make_basis(req);
}

Outcome decomposition() {
  Outcome out;
  const std::uint64_t beta = R("sqrt3").frac_bits();
  const RealPolynomial p = RealPolynomial::from_fixed({FixedReal(), R("sqrt2")});
  const Window w{0, 100000};
  const auto a = sample_sequence([&](std::int64_t n) { return turns(static_cast<std::uint64_t>(eval_floor(p, n)) * beta); }, w);
  std::vector<NilBasis> ladder;
  for (int K : {8, 16, 32, 64, 128}) ladder.push_back(fejer_rung(K));
  const auto rep = decompose(a, ladder, 0.05);
  out.require(rep.certified, "not certified, residual " + fmt(rep.residual));
  out.require(rep.residual <= 0.05, "residual " + fmt(rep.residual));
  for (std::size_t i = 1; i < rep.ladder.size(); ++i) {
    out.require(rep.ladder[i].residual <= rep.ladder[i - 1].residual, "ladder residual increased at " + std::to_string(i));
  }
  double worst = 0.0;
  for (double m : rep.margins) worst = std::max(worst, m);
  out.require(worst <= 1e-6, "orthogonality margin " + fmt(worst));

  // Pure basis members certify at the first rung.
  const std::uint64_t r2 = R("sqrt2").frac_bits(), r6 = R("sqrt6").frac_bits();
  double pure = 0.0;
  for (const std::uint64_t theta : {r2, r6, 3 * r2 - r6, std::uint64_t{0}}) {
    const auto s = sample_sequence([&](std::int64_t n) { return turns(static_cast<std::uint64_t>(n) * theta); }, w);
    const auto r = decompose(s, ladder, 0.05);
    out.require(r.certified && r.index == 0, "pure member not certified at index 0");
    pure = std::max(pure, r.residual);
  }
  out.require(pure <= 1e-10, "pure residual " + fmt(pure));
  std::string trail;
  for (const auto& row : rep.ladder) trail += (trail.empty() ? "" : " ") + fmt(row.residual);
  out.note("certified at index " + std::to_string(rep.index) + " with residual " + fmt(rep.residual) + " (ladder " + trail +
           "), margin " + fmt(worst) + ", pure residual " + fmt(pure));
  return out;
}

// ---------------------------------------------------------------- 8

std::string trace_text(const PetTrace& t) {
  std::string s;
  for (const auto& st : t.steps) {
    for (const auto& c : st.family) s += c + ";";
    s += "|" + std::to_string(st.pivot) + "|";
    for (const auto& c : st.result) s += c + ";";
    s += "\n";
  }
  return s + std::to_string(t.depth) + "/" + std::to_string(t.k_estimate);
}

Outcome pet() {
  Outcome out;
  const auto lin = pet_reduce({{{RealPolynomial::from_fixed({FixedReal(), R("sqrt2")})}}});
  out.require(lin.completed && lin.depth == 1 && lin.k_estimate == 2, "single linear gave d=" + std::to_string(lin.depth));
  std::string ds;
  for (std::int64_t m = 1; m <= 4; ++m) {
    std::vector<RealPolynomial> row;
    for (std::int64_t j = 1; j <= m; ++j) row.push_back(RealPolynomial::from_integers({0, j * j + 1}));
    const auto t = pet_reduce({{row}});
    out.require(t.completed && t.depth <= m, std::to_string(m) + " linear entries gave d=" + std::to_string(t.depth));
    ds += (ds.empty() ? "" : ",") + std::to_string(t.depth);
  }
  const auto quad = pet_reduce({{{RealPolynomial::from_integers({0, 0, 1})}}});
  out.require(quad.depth == 2 && quad.k_estimate == 3, "quadratic gave d=" + std::to_string(quad.depth));
  const std::vector<PolyFamily> fams{
      {{{RealPolynomial::from_integers({0, 0, 1}), RealPolynomial::from_integers({0, 1})},
        {RealPolynomial::from_integers({0, 1}), RealPolynomial()}}},
      {{{RealPolynomial::from_integers({0, 0, 0, 1}), RealPolynomial::from_integers({0, 2, 1})}}},
      {{{RealPolynomial::from_fixed({FixedReal(), R("sqrt2"), R("sqrt3")})}}}};
  for (const auto& f : fams) out.require(trace_text(pet_reduce(f)) == trace_text(pet_reduce(f)), "trace replay differs");
  out.note("linear d=1 k=2; m=1..4 gives d=" + ds + "; quadratic d=2 k=3; traces replay");
  return out;
}

// ---------------------------------------------------------------- 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  Outcome out;
  const fs::path base = fs::temp_directory_path() / ("ergolab_acceptance_" + std::to_string(::getpid()));
  std::size_t count = 0;
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(kConfigs)) configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  for (const auto& path : configs) {
    std::string files[2][2];
    for (int run = 0; run < 2; ++run) {
      ExperimentConfig cfg = ExperimentConfig::load(path);
      cfg.output_dir = base / std::to_string(run);
      write_artifacts(run_scenario(cfg), cfg);
      json doc = json::parse(slurp(cfg.json_path()));
      doc.erase("timing");
      files[run][0] = doc.dump();
      files[run][1] = slurp(cfg.csv_path());
    }
    out.require(files[0][0] == files[1][0], path.filename().string() + " JSON differs");
    out.require(files[0][1] == files[1][1], path.filename().string() + " CSV differs");
    ++count;
  }
  fs::remove_all(base);
  out.note(std::to_string(count) + " scenarios rerun byte-identical apart from timing");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {{1, "exact identities", exact_identities},
                                {2, "oracle equivalence", oracle_equivalence},
                                {3, "seminorm calibration", calibration},
                                {4, "equidistribution", equidistribution},
                                {5, "zero limit", zero_limit},
                                {6, "inequality suite", inequality_suite},
                                {7, "decomposition", decomposition},
                                {8, "PET depth", pet},
                                {9, "reproducibility", reproducibility}};
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s = seconds_since(t0);
    std::printf("[%s] criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), s);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}

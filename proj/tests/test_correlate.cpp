#include <doctest.h>

#include <random>

#include "ergolab/correlate.hpp"
#include "ergolab/errors.hpp"
#include "oracles.hpp"

using namespace ergolab;

namespace {

RealPolynomial rational_poly(const std::vector<oracle::Frac>& c) {
  std::vector<Coefficient> out;
  for (const auto& f : c) out.push_back(Coefficient::rational(static_cast<std::int64_t>(f.num), static_cast<std::int64_t>(f.den)));
  return RealPolynomial(out);
}

cplx turns(std::uint64_t bits) { return std::polar(1.0, 2.0 * M_PI * std::ldexp(static_cast<double>(bits), -64)); }

}  // namespace

TEST_CASE("rotation correlation has the closed form e([sqrt2 n] beta)") {
  const StateSpace t1 = StateSpace::torus(1);
  const FixedReal beta = parse_real("sqrt3").value;
  CorrelationSpec spec;
  spec.system = CommutingSystem(t1, {Transformation::rotation({beta})}, Sampler::lattice(12));
  spec.iterates = {{RealPolynomial::from_fixed({FixedReal::from_int(0), parse_real("sqrt2").value})}};
  spec.observables = {Observable::character(t1, {-1}), Observable::character(t1, {1})};
  const auto spectral = corr_seq(spec, {0, 500});
  const auto sampled = corr_seq(spec, {0, 500}, Route::Sampler);
  for (std::int64_t n = 0; n < 500; ++n) {
    const auto k = eval_floor(spec.iterates[0][0], n);
    const cplx want = turns(static_cast<std::uint64_t>(k) * beta.frac_bits());
    REQUIRE(std::abs(spectral.at(n) - want) <= 1e-12);
    REQUIRE(std::abs(sampled.at(n) - want) <= 1e-12);
  }
}

TEST_CASE("zero iterates give the constant integral") {
  const StateSpace z = StateSpace::cyclic(12);
  CorrelationSpec spec;
  spec.system = CommutingSystem(z, {Transformation::cyclic_shift(12, 1)});
  spec.iterates = {{RealPolynomial(), RealPolynomial()}};
  spec.observables = {Observable::residue_character(12, 1), Observable::residue_character(12, 2),
                      Observable::residue_character(12, -3)};
  const cplx c = spectral_integral(spec.observables);
  const auto a = corr_seq(spec, {-20, 20});
  for (auto v : a.values) CHECK(std::abs(v - c) < 1e-15);
}

TEST_CASE("Z12 shift with chi_1 against the 12-point sum") {
  const StateSpace z = StateSpace::cyclic(12);
  CorrelationSpec spec;
  spec.system = CommutingSystem(z, {Transformation::cyclic_shift(12, 1)});
  spec.iterates = {{RealPolynomial::from_integers({0, 1})}};
  spec.observables = {Observable::residue_character(12, 1), Observable::residue_character(12, 1)};
  const oracle::FiniteSystem X(12, 1);
  const oracle::PointFn chi = [](const std::vector<std::int64_t>& x) { return oracle::e(static_cast<double>(x[0]) / 12.0); };
  for (std::int64_t n = 0; n < 24; ++n) {
    const cplx want = oracle::correlation(X, {oracle::shift(12, 1)}, {{{{0, 1}, {1, 1}}}}, {chi, chi}, n);
    CHECK(std::abs(correlation_at(spec, n) - want) < 1e-12);
  }
}

TEST_CASE("random finite systems match the enumeration oracle") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::int64_t> num(-7, 7), den(1, 4);
  for (std::int64_t q : {5, 12, 24}) {
    for (int d : {1, 2}) {
      for (int trial = 0; trial < 3; ++trial) {
        // Two commuting maps: an affine map and its square.
        std::vector<std::vector<std::int64_t>> A = d == 1 ? std::vector<std::vector<std::int64_t>>{{1}}
                                                          : std::vector<std::vector<std::int64_t>>{{1, 1}, {0, 1}};
        const std::int64_t r = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q - 1));
        std::vector<std::int64_t> b(static_cast<std::size_t>(d), 0);
        b[0] = r;
        const oracle::ModMap base{q, A, b};
        const StateSpace space = StateSpace::cyclic(static_cast<std::uint64_t>(q), d);
        const Transformation shift(space, {AffineMap::translation(static_cast<std::uint64_t>(q),
                                                                  std::vector<std::uint64_t>(b.begin(), b.end()))
                                               .compose(AffineMap::linear(static_cast<std::uint64_t>(q), A))});
        const Transformation T2 = shift.power(2);

        const std::size_t ell = 2, m = 2;
        std::vector<std::vector<std::vector<oracle::Frac>>> grid(ell, std::vector<std::vector<oracle::Frac>>(m));
        std::vector<std::vector<RealPolynomial>> iter(ell, std::vector<RealPolynomial>(m));
        for (std::size_t i = 0; i < ell; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            const int deg = static_cast<int>(rng() % 3);
            for (int c = 0; c <= deg; ++c) grid[i][j].push_back({num(rng), den(rng)});
            iter[i][j] = rational_poly(grid[i][j]);
          }
        }
        // Random tables for the observables.
        const oracle::FiniteSystem X(q, d);
        std::vector<std::vector<cplx>> tables(m + 1, std::vector<cplx>(X.points.size()));
        std::uniform_real_distribution<double> u(-0.6, 0.6);
        for (auto& t : tables) {
          for (auto& v : t) v = {u(rng), u(rng)};
        }
        CorrelationSpec spec;
        spec.system = CommutingSystem(space, {shift, T2});
        spec.iterates = iter;
        std::vector<oracle::PointFn> fs;
        for (const auto& t : tables) {
          spec.observables.push_back(Observable::from_table(space, t));
          fs.push_back([&X, t](const std::vector<std::int64_t>& x) { return t[X.index(x)]; });
        }
        // base² as a ModMap: A² x + (A b + b).
        oracle::ModMap base_sq{q, A, b};
        if (d == 2) {
          base_sq.A = {{1, 2}, {0, 1}};
          base_sq.b = {(b[0] + b[0] + b[1]) % q, (b[1] * 2) % q};
        } else {
          base_sq.b = {(2 * b[0]) % q};
        }
        for (std::int64_t n = -6; n < 10; ++n) {
          const cplx want = oracle::correlation(X, {base, base_sq}, grid, fs, n);
          const double scale = std::max(1.0, std::abs(want));
          REQUIRE(std::abs(correlation_at(spec, n, Route::Spectral) - want) <= 1e-12 * scale);
          REQUIRE(std::abs(correlation_at(spec, n, Route::Sampler) - want) <= 1e-12 * scale);
        }
      }
    }
  }
}

TEST_CASE("multi_average") {
  const StateSpace t1 = StateSpace::torus(1);
  const FixedReal alpha = parse_real("sqrt2").value;
  CorrelationSpec spec;
  spec.system = CommutingSystem(t1, {Transformation::rotation({alpha})}, Sampler::lattice(10));
  spec.iterates = {{RealPolynomial::from_integers({0, 1})}};
  spec.observables = {Observable::constant(t1, 1.0), Observable::character(t1, {1})};
  const MultiAverage ma = multi_average(spec, {0, 10000});
  const double bound = 2.0 / (10000.0 * std::abs(1.0 - turns(alpha.frac_bits())));
  CHECK(ma.l2_spectral <= bound);
  CHECK(std::abs(ma.l2_sampled - ma.l2_spectral) < 1e-9);

  spec.observables[1] = Observable::constant(t1, 1.0);
  const MultiAverage one = multi_average(spec, {5, 105});
  CHECK(std::abs(one.l2_spectral - 1.0) < 1e-15);
  for (auto v : one.values) CHECK(std::abs(v - cplx(1.0)) < 1e-15);
}

TEST_CASE("multi_average L2 agrees with brute force on a finite space") {
  const StateSpace z = StateSpace::cyclic(10);
  CorrelationSpec spec;
  spec.system = CommutingSystem(z, {Transformation::cyclic_shift(10, 3)});
  spec.iterates = {{RealPolynomial::from_integers({0, 1}), RealPolynomial::from_integers({0, 0, 1})}};
  spec.observables = {Observable::constant(z, 1.0), Observable::from_table(z, {1, 0.5, 0, -0.25, 0, 0, 0.75, 0, 0, 0.1}),
                      Observable::residue_character(10, 3)};
  const MultiAverage ma = multi_average(spec, {0, 37});
  double s = 0.0;
  for (std::int64_t x = 0; x < 10; ++x) {
    cplx avg = 0.0;
    for (std::int64_t n = 0; n < 37; ++n) {
      const StatePoint y1{{static_cast<std::uint64_t>((x + 3 * n) % 10)}};
      const StatePoint y2{{static_cast<std::uint64_t>((x + 3 * n * n) % 10)}};
      avg += spec.observables[1](y1) * spec.observables[2](y2);
    }
    s += std::norm(avg / 37.0);
  }
  CHECK(std::abs(ma.l2_spectral - std::sqrt(s / 10)) < 1e-12);
  CHECK(std::abs(ma.l2_sampled - std::sqrt(s / 10)) < 1e-12);
}

TEST_CASE("uniform_seminorm") {
  const auto fam = WindowFamily::lengths(1, {1000, 10000, 100000});
  CHECK(std::abs(uniform_seminorm([](std::int64_t) { return cplx(0.0, 0.5); }, fam).value - 0.5) < 1e-15);
  const FixedReal alpha = parse_real("sqrt5").value;
  CHECK(std::abs(uniform_seminorm([&](std::int64_t n) { return turns(static_cast<std::uint64_t>(n) * alpha.frac_bits()); }, fam).value - 1.0) < 1e-12);
  auto square = [](std::int64_t n) {
    const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return cplx(r * r == n ? 1.0 : 0.0);
  };
  const auto big = WindowFamily::lengths(1, {10000, 100000, 250000});
  const auto u = uniform_seminorm(square, big);
  CHECK(u.squared <= 0.01);
  CHECK(std::abs(u.value * u.value - u.squared) < 1e-15);
}

TEST_CASE("cauchy_report") {
  const StateSpace t1 = StateSpace::torus(1);
  CorrelationSpec spec;
  spec.system = CommutingSystem(t1, {Transformation::rotation({parse_real("sqrt2").value})}, Sampler::lattice(4));
  spec.iterates = {{RealPolynomial::from_integers({0, 1})}};
  spec.observables = {Observable::constant(t1, 1.0), Observable::constant(t1, 1.0)};
  for (const auto& r : cauchy_report(spec, 0, 16, 5, 1e-12).rows) CHECK(r.diff_l2 == 0.0);

  spec.observables[1] = Observable::character(t1, {1});
  const double c = 2.0 / std::abs(1.0 - turns(parse_real("sqrt2").value.frac_bits()));
  for (const auto& r : cauchy_report(spec, 0, 64, 6, 1e-3).rows) {
    CHECK(r.diff_l2 <= 2.0 * c / static_cast<double>(r.from.length()));
  }

  const StateSpace z = StateSpace::cyclic(12);
  CorrelationSpec zs;
  zs.system = CommutingSystem(z, {Transformation::cyclic_shift(12, 5)});
  zs.iterates = {{RealPolynomial::from_integers({0, 1}), RealPolynomial::from_integers({0, 0, 1})}};
  zs.observables = {Observable::constant(z, 1.0), Observable::residue_character(12, 1), Observable::residue_character(12, -1)};
  const auto rep = cauchy_report(zs, 0, 12, 5, 1e-12);
  for (const auto& r : rep.rows) CHECK(r.diff_l2 < 1e-15);
  CHECK(rep.converged);
  CHECK_THROWS_AS(cauchy_report(zs, 0, 12, 3, 1e-12), InvalidInput);
}

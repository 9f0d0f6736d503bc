#include <doctest.h>

#include <random>

#include "ergolab/errors.hpp"
#include "ergolab/pet.hpp"

using namespace ergolab;

namespace {

RealPolynomial P(std::vector<std::int64_t> c) { return RealPolynomial::from_integers(c); }
RealPolynomial Z() { return RealPolynomial(); }
FixedReal R(const char* s) { return parse_real(s).value; }

std::string trace_text(const PetTrace& t) {
  std::string s;
  for (const auto& st : t.steps) {
    for (const auto& c : st.family) s += c + ";";
    s += "|" + std::to_string(st.pivot) + "|";
    for (const auto& c : st.result) s += c + ";";
    s += "\n";
  }
  return s + std::to_string(t.depth);
}

using cvec = std::vector<std::complex<double>>;

}  // namespace

TEST_CASE("nice families") {
  CHECK(is_nice({{{P({0, 0, 1}), P({0, 1})}, {P({0, 1}), Z()}}}).nice);
  const auto two = is_nice({{{P({0, 1}), P({0, 1})}}});
  CHECK_FALSE(two.nice);
  CHECK_FALSE(two.failing.empty());
  CHECK(is_nice({{{P({0, 1})}}}).nice);
  // (ii): a lower row reaching the top degree.
  CHECK_FALSE(is_nice({{{P({0, 0, 1})}, {P({0, 0, 1})}}}).nice);
  // (iii): differences in the first row must dominate.
  CHECK_FALSE(is_nice({{{P({0, 0, 1}), P({0, 0, 1})}, {P({0, 1}), Z()}}}).nice);
  CHECK_THROWS_AS(is_nice({{{RealPolynomial::from_fixed({FixedReal(), R("sqrt2")})}}}), InvalidInput);
}

TEST_CASE("R-nice families") {
  const RealPolynomial q2 = RealPolynomial::from_fixed({FixedReal(), FixedReal(), R("sqrt2")});
  const RealPolynomial q1 = RealPolynomial::from_fixed({FixedReal(), R("sqrt3")});
  const RealPolynomial q2b = RealPolynomial::from_fixed({FixedReal(), FixedReal(), R("sqrt5")});
  CHECK(is_r_nice({{{q2, Z()}, {Z(), q1}}}).nice);
  CHECK_FALSE(is_r_nice({{{q2, Z()}, {Z(), q2b}}}).nice);
  CHECK(is_r_nice({{{RealPolynomial::from_fixed({FixedReal(), R("sqrt2")})}}}).nice);
  // A lone entry of any degree vectorizes to a nice family.
  for (int d = 1; d <= 5; ++d) {
    std::vector<FixedReal> c(static_cast<std::size_t>(d + 1), R("phi"));
    CHECK(is_r_nice({{{RealPolynomial::from_fixed(c)}}}).nice);
  }
  const PolyFamily v = vectorize({{{q2, Z()}, {Z(), q1}}});
  CHECK(v.ell() == 6);
  CHECK(v.m() == 2);
  CHECK(v.grid[0][0] == P({0, 0, 1}));
  CHECK(v.grid[3][1] == P({0, 1}));
}

TEST_CASE("symbolic shifts") {
  const SymPoly p = SymPoly::from_real(P({0, 0, 1}));
  const SymPoly d = p.substitute_shift(1) - p;  // 2nh + h²
  CHECK(d.degree_in_n() == 1);
  const SymPoly dd = d.substitute_shift(2) - d;  // 2 h_1 h_2
  CHECK(dd.n_free());
  CHECK_FALSE(dd.is_zero());
  CHECK((p - p).is_zero());
}

TEST_CASE("PET reduction depth") {
  const auto lin = pet_reduce({{{RealPolynomial::from_fixed({FixedReal(), R("sqrt2")})}}});
  CHECK(lin.depth == 1);
  CHECK(lin.k_estimate == 2);
  CHECK(lin.completed);

  for (std::int64_t m = 1; m <= 4; ++m) {
    std::vector<RealPolynomial> row;
    for (std::int64_t j = 1; j <= m; ++j) row.push_back(P({0, j}));
    const auto t = pet_reduce({{row}});
    CHECK(t.completed);
    CHECK(t.depth <= m);
    CHECK(t.depth >= 1);
  }

  const auto quad = pet_reduce({{{P({0, 0, 1})}}});
  CHECK(quad.depth == 2);
  CHECK(quad.k_estimate == 3);

  // Same weight signature, different coefficients: same depth.
  const auto quad2 = pet_reduce({{{RealPolynomial::from_fixed({R("1/3"), R("pi"), R("sqrt2")})}}});
  CHECK(quad2.depth == quad.depth);

  const PolyFamily mixed{{{P({0, 0, 1}), P({0, 1})}, {P({0, 1}), Z()}}};
  CHECK(trace_text(pet_reduce(mixed)) == trace_text(pet_reduce(mixed)));
  CHECK(pet_reduce(mixed).completed);

  const auto cut = pet_reduce({{{P({0, 0, 0, 0, 0, 1})}}}, 2);
  CHECK_FALSE(cut.completed);
  CHECK(cut.depth == 2);
}

TEST_CASE("PET stops on random families up to degree 5") {
  std::mt19937_64 rng(19);
  int completed = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t ell = 1 + rng() % 4, m = 1 + rng() % 4;
    const std::size_t dmax = 1 + rng() % 5;
    PolyFamily fam;
    fam.grid.assign(ell, std::vector<RealPolynomial>(m));
    for (auto& row : fam.grid) {
      for (auto& p : row) {
        std::vector<std::int64_t> c(1 + rng() % (dmax + 1));
        for (auto& x : c) x = static_cast<std::int64_t>(rng() % 7) - 3;
        p = P(c);
      }
    }
    fam.grid[0][0] = P({0, 1});
    const auto t = pet_reduce(fam);
    CHECK(t.depth <= kPetMaxDepth);
    CHECK(t.steps.size() == static_cast<std::size_t>(t.depth));
    if (t.completed) {
      ++completed;
      CHECK(t.k_estimate == t.depth + 1);
    } else {
      CHECK(t.k_estimate == 0);
    }
  }
  CHECK(completed > 0);
}

TEST_CASE("PET depth ignores coefficient values") {
  std::mt19937_64 rng(23);
  // Same degrees and leading structure, perturbed coefficients.
  for (int trial = 0; trial < 10; ++trial) {
    auto coef = [&] { return static_cast<std::int64_t>(1 + rng() % 9); };
    const PolyFamily a{{{P({0, 0, coef()}), P({0, coef()})}, {P({0, coef()}), Z()}}};
    const PolyFamily b{{{P({coef(), coef(), coef()}), P({coef(), coef()})}, {P({coef(), coef()}), Z()}}};
    CHECK(pet_reduce(a).depth == pet_reduce(b).depth);
  }
}

TEST_CASE("van der Corput numeric check") {
  const int H = 32;
  SUBCASE("constant vector") {
    std::vector<cvec> v(4000, cvec{{0.6, 0.0}, {0.0, 0.8}});
    const auto r = vdc_numeric_check(v, H);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.rhs == doctest::Approx(4.0));
    CHECK(r.finite_bound >= r.lhs - 1e-12);
  }
  SUBCASE("rotating vector") {
    const double a = std::sqrt(2.0);
    std::vector<cvec> v(20000);
    for (std::size_t n = 0; n < v.size(); ++n) {
      const auto z = std::polar(1.0, 2 * M_PI * std::fmod(a * static_cast<double>(n), 1.0));
      v[n] = {z * 0.6, z * 0.8};
    }
    const auto r = vdc_numeric_check(v, H);
    CHECK(r.lhs < 1e-6);
    CHECK(r.margin >= 0.0);
    CHECK(r.finite_bound >= r.lhs);
  }
  SUBCASE("random unit vectors") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    std::vector<cvec> v(100000, cvec(3));
    for (auto& x : v) {
      double s = 0;
      for (auto& c : x) {
        c = {g(rng), g(rng)};
        s += std::norm(c);
      }
      for (auto& c : x) c /= std::sqrt(s);
    }
    const auto r = vdc_numeric_check(v, 64);
    CHECK(r.margin >= 0.0);
    CHECK(r.finite_bound >= r.lhs);
  }
  CHECK_THROWS_AS(vdc_numeric_check(std::vector<cvec>(50, cvec{1.0}), 32), InsufficientWindow);
}

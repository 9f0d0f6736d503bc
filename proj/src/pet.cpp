#include "ergolab/pet.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

int PolyFamily::max_degree() const {
  int d = -1;
  for (const auto& row : grid) {
    for (const auto& p : row) d = std::max(d, p.degree());
  }
  return d;
}

void PolyFamily::validate() const {
  if (grid.empty() || grid[0].empty()) throw InvalidInput("polynomial family must be non-empty");
  for (const auto& row : grid) {
    if (row.size() != grid[0].size()) throw InvalidInput("polynomial family rows must have equal length");
  }
}

namespace {

RealPolynomial difference(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(std::max(a.degree(), b.degree()) + 1), 0);
  for (int i = 0; i <= a.degree(); ++i) c[static_cast<std::size_t>(i)] += a.coefficient(i).exact->num;
  for (int i = 0; i <= b.degree(); ++i) c[static_cast<std::size_t>(i)] -= b.coefficient(i).exact->num;
  return RealPolynomial::from_integers(c);
}

}  // namespace

NiceResult is_nice(const PolyFamily& fam) {
  fam.validate();
  for (const auto& row : fam.grid) {
    for (const auto& p : row) {
      if (!p.has_integer_coefficients()) throw InvalidInput("is_nice needs integer coefficients");
    }
  }
  const std::size_t L = fam.ell();
  const std::size_t M = fam.m();
  const int d11 = fam.grid[0][0].degree();
  for (std::size_t j = 0; j < M; ++j) {
    if (fam.grid[0][j].degree() > d11) return {false, "(i) deg p_{1,1} < deg p_{1," + std::to_string(j + 1) + "}"};
  }
  for (std::size_t i = 1; i < L; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (!(d11 > fam.grid[i][j].degree())) {
        return {false, "(ii) deg p_{1,1} <= deg p_{" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "}"};
      }
    }
  }
  for (std::size_t i = 1; i < L; ++i) {
    for (std::size_t j = 1; j < M; ++j) {
      const int lhs = difference(fam.grid[0][0], fam.grid[0][j]).degree();
      const int rhs = difference(fam.grid[i][0], fam.grid[i][j]).degree();
      if (!(lhs > rhs)) {
        return {false, "(iii) fails for i=" + std::to_string(i + 1) + ", j=" + std::to_string(j + 1)};
      }
    }
  }
  if (fam.max_degree() == 1) {
    // Counted per tuple (column), so a lone tuple is always nice.
    int nonzero = 0;
    for (std::size_t j = 0; j < M; ++j) {
      bool any = false;
      for (const auto& row : fam.grid) any = any || !row[j].is_zero();
      nonzero += any ? 1 : 0;
    }
    if (nonzero > 1) return {false, "max degree 1 with more than one non-zero tuple"};
  }
  return {true, {}};
}

PolyFamily vectorize(const PolyFamily& fam) {
  fam.validate();
  const int d = std::max(fam.max_degree(), 0);
  PolyFamily out;
  for (const auto& row : fam.grid) {
    // Row i expands into d+1 rows, one per coordinate of the vectors.
    std::vector<std::vector<RealPolynomial>> rows(static_cast<std::size_t>(d + 1),
                                                  std::vector<RealPolynomial>(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
      const RealPolynomial& p = row[j];
      const int r = p.degree();
      for (int c = 0; c <= r; ++c) {
        const int power = r - c;
        if (!p.coefficient(power).is_zero()) {
          rows[static_cast<std::size_t>(c)][j] = RealPolynomial::monomial(Coefficient::integer(1), power);
        }
      }
    }
    for (auto& r : rows) out.grid.push_back(std::move(r));
  }
  return out;
}

NiceResult is_r_nice(const PolyFamily& fam) { return is_nice(vectorize(fam)); }

// ------------------------------------------------------------------ SymPoly

namespace {

void trim_monomial(SymPoly::Monomial& m) {
  while (m.size() > 1 && m.back() == 0) m.pop_back();
}

BigInt binomial(int a, int b) {
  BigInt r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

}  // namespace

void SymPoly::trim() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it = it->second == 0 ? terms_.erase(it) : std::next(it);
  }
}

SymPoly SymPoly::from_real(const RealPolynomial& p) {
  SymPoly s;
  for (int i = 0; i <= p.degree(); ++i) {
    const int128 raw = p.coefficient(i).value.raw();
    if (raw != 0) s.terms_[{i}] = BigInt(ergolab::to_string(raw));
  }
  return s;
}

SymPoly SymPoly::substitute_shift(int h_index) const {
  SymPoly out;
  for (const auto& [mono, c] : terms_) {
    const int a = mono[0];
    for (int b = 0; b <= a; ++b) {
      Monomial m = mono;
      if (static_cast<int>(m.size()) <= h_index) m.resize(static_cast<std::size_t>(h_index + 1), 0);
      m[0] = a - b;
      m[static_cast<std::size_t>(h_index)] += b;
      trim_monomial(m);
      out.terms_[m] += c * binomial(a, b);
    }
  }
  out.trim();
  return out;
}

SymPoly SymPoly::operator-(const SymPoly& o) const {
  SymPoly out = *this;
  for (const auto& [m, c] : o.terms_) out.terms_[m] -= c;
  out.trim();
  return out;
}

int SymPoly::degree_in_n() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m[0]);
  return d;
}

SymPoly SymPoly::n_dependent_part() const {
  SymPoly out;
  for (const auto& [m, c] : terms_) {
    if (m[0] >= 1) out.terms_[m] = c;
  }
  return out;
}

std::string SymPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    const double v = std::ldexp(c.convert_to<double>(), -64);
    os << (first ? (v < 0 ? "-" : "") : (v < 0 ? " - " : " + ")) << std::abs(v);
    first = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      os << '*' << (i == 0 ? std::string("n") : "h" + std::to_string(i));
      if (m[i] > 1) os << '^' << m[i];
    }
  }
  return os.str();
}

// -------------------------------------------------------------------- PET

namespace {

using Column = std::vector<SymPoly>;

int column_degree(const Column& c) {
  int d = -1;
  for (const auto& p : c) d = std::max(d, p.degree_in_n());
  return d;
}

int column_lead(const Column& c) {
  const int d = column_degree(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].degree_in_n() == d) return static_cast<int>(i);
  }
  return 0;
}

bool column_constant(const Column& c) {
  for (const auto& p : c) {
    if (!p.n_free()) return false;
  }
  return true;
}

Column n_dependent(const Column& c) {
  Column out;
  for (const auto& p : c) out.push_back(p.n_dependent_part());
  return out;
}

// Columns are kept without their n-free terms, which never reach the n-dependent part.
// Adds c unless it is constant or already present.
void add_column(std::vector<Column>& family, std::set<Column>& seen, const Column& c) {
  if (column_constant(c)) return;
  Column key = n_dependent(c);
  if (!seen.insert(key).second) return;
  family.push_back(std::move(key));
}

std::string column_string(const Column& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + c[i].to_string();
  return s + ")";
}

std::vector<std::string> family_strings(const std::vector<Column>& f) {
  std::vector<std::string> out;
  for (const auto& c : f) out.push_back(column_string(c));
  return out;
}

std::vector<std::pair<int, int>> family_weight(const std::vector<Column>& f) {
  std::vector<std::pair<int, int>> w;
  for (const auto& c : f) w.emplace_back(column_lead(c), column_degree(c));
  std::sort(w.begin(), w.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return w;
}

std::size_t choose_pivot(const std::vector<Column>& f, std::size_t ell) {
  std::vector<int> count(ell, 0);
  for (const auto& c : f) ++count[static_cast<std::size_t>(column_lead(c))];
  const int lead = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
  std::size_t best = f.size();
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (column_lead(f[j]) != lead) continue;
    if (best == f.size() || column_degree(f[j]) < column_degree(f[best])) best = j;
  }
  return best;
}

}  // namespace

PetTrace pet_reduce(const PolyFamily& fam, int max_depth) {
  fam.validate();
  std::vector<Column> family;
  std::set<Column> seen;
  for (std::size_t j = 0; j < fam.m(); ++j) {
    Column c;
    for (std::size_t i = 0; i < fam.ell(); ++i) c.push_back(SymPoly::from_real(fam.grid[i][j]));
    add_column(family, seen, c);
  }
  if (family.empty()) throw InvalidInput("pet_reduce needs at least one nonconstant entry");

  PetTrace trace;
  while (!family.empty()) {
    if (trace.depth >= max_depth) return trace;
    const int h = trace.depth + 1;
    PetStep step;
    step.family = family_strings(family);
    step.weight = family_weight(family);
    step.pivot = choose_pivot(family, fam.ell());
    const Column& pivot = family[step.pivot];
    std::vector<Column> next;
    std::set<Column> next_seen;
    std::size_t terms = 0;
    for (const auto& c : family) {
      Column shifted, plain;
      for (std::size_t i = 0; i < c.size(); ++i) {
        shifted.push_back(c[i].substitute_shift(h) - pivot[i]);
        plain.push_back(c[i] - pivot[i]);
      }
      add_column(next, next_seen, shifted);
      add_column(next, next_seen, plain);
      // Past a budget the reduction stops like the depth guard, with a partial trace.
      if (next.size() > kPetMaxColumns) return trace;
      for (const auto& p : shifted) terms += p.term_count();
      if (terms > kPetMaxTerms) return trace;
    }
    step.result = family_strings(next);
    trace.steps.push_back(std::move(step));
    family = std::move(next);
    ++trace.depth;
  }
  trace.completed = true;
  trace.k_estimate = trace.depth + 1;
  return trace;
}

VdcReport vdc_numeric_check(const std::vector<std::vector<std::complex<double>>>& v, int H) {
  if (H < 1) throw InvalidInput("H must be positive");
  const std::size_t L = v.size();
  if (L < static_cast<std::size_t>(3 * H) + 2) throw InsufficientWindow("sequence too short for the requested H");
  const std::size_t D = v.front().size();
  for (const auto& x : v) {
    if (x.size() != D) throw InvalidInput("all vectors must have the same dimension");
  }
  const std::size_t full = L - static_cast<std::size_t>(H);
  const std::size_t scales[2] = {full / 2, full};

  auto inner = [&](std::size_t a, std::size_t b) {
    std::complex<long double> s = 0.0L;
    for (std::size_t i = 0; i < D; ++i) {
      const auto p = v[a][i] * std::conj(v[b][i]);
      s += std::complex<long double>(p.real(), p.imag());
    }
    return s;
  };

  VdcReport out;
  double lhs = 0.0;
  for (std::size_t len : scales) {
    std::vector<std::complex<long double>> mean(D, 0.0L);
    for (std::size_t n = 0; n < len; ++n) {
      for (std::size_t i = 0; i < D; ++i) mean[i] += std::complex<long double>(v[n][i].real(), v[n][i].imag());
    }
    long double sq = 0.0L;
    for (auto& m : mean) sq += std::norm(m / static_cast<long double>(len));
    lhs = std::max(lhs, static_cast<double>(sq));
  }
  // Correlations per h, both scales, via prefix sums over n.
  std::vector<double> best(static_cast<std::size_t>(H) + 1, 0.0);
  std::vector<long double> full_re(static_cast<std::size_t>(H) + 1, 0.0L);
  for_each_index(static_cast<std::size_t>(H) + 1, [&](std::size_t h) {
    std::complex<long double> s = 0.0L;
    double b = 0.0;
    std::size_t n = 0;
    for (std::size_t len : scales) {
      for (; n < len; ++n) s += inner(n + h, n);
      b = std::max(b, static_cast<double>(std::abs(s / static_cast<long double>(len))));
    }
    best[h] = b;
    std::complex<long double> t = 0.0L;
    for (std::size_t k = 0; k + h < full; ++k) t += inner(k + h, k);
    full_re[h] = t.real();
  });
  double acc = 0.0;
  for (int h = 1; h <= H; ++h) acc += best[static_cast<std::size_t>(h)];
  out.lhs = lhs;
  out.rhs = 4.0 * acc / H;
  out.margin = out.rhs - out.lhs;
  // ‖Σ u‖² ≤ (N+H)/(H+1) [Σ‖u‖² + 2 Σ_h (1 − h/(H+1)) Re Σ ⟨u_{n+h}, u_n⟩], divided by N²,
  // with u supported on the longer window.
  const auto N = static_cast<long double>(full);
  long double bracket = full_re[0];
  for (int h = 1; h <= H; ++h) {
    bracket += 2.0L * (1.0L - static_cast<long double>(h) / (H + 1)) * full_re[static_cast<std::size_t>(h)];
  }
  out.finite_bound = static_cast<double>((N + H) / (H + 1) * bracket / (N * N));
  return out;
}

}  // namespace ergolab

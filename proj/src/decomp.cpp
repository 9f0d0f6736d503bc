#include "ergolab/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

namespace {

constexpr std::size_t kSplit = 256;

cplx phase_to_cplx(std::uint64_t phase) {
  const long double t = std::ldexp(static_cast<long double>(static_cast<std::int64_t>(phase)), -64);
  const long double a = 2.0L * std::numbers::pi_v<long double> * t;
  return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

// Member values on a window. Single characters use e(nθ) = e((M + 256q)θ)·e(rθ)
// tables; other members are stored densely.
class MemberTable {
 public:
  MemberTable(const NilBasis& basis, Window w) : w_(w), size_(static_cast<std::size_t>(w.length())) {
    const std::size_t B = basis.size();
    exact_.resize(B);
    coef_.resize(B);
    lo_.resize(B);
    hi_.resize(B);
    dense_.resize(B);
    std::size_t dense_entries = 0;
    for (std::size_t j = 0; j < B; ++j) {
      if (!basis.members[j].seq.exact_phase()) dense_entries += size_;
    }
    if (dense_entries > kDenseMemberBudget) throw BudgetExceeded("basis evaluation exceeds the dense table budget");
    const std::size_t nq = (size_ + kSplit - 1) / kSplit;
    for_each_index(B, [&](std::size_t j) {
      const Nilsequence& s = basis.members[j].seq;
      if (auto ph = s.exact_phase()) {
        exact_[j] = true;
        coef_[j] = s.exact_coef();
        lo_[j].resize(kSplit);
        hi_[j].resize(nq);
        for (std::size_t r = 0; r < kSplit; ++r) lo_[j][r] = phase_to_cplx(static_cast<std::uint64_t>(r) * *ph);
        for (std::size_t q = 0; q < nq; ++q) {
          const auto n = static_cast<std::uint64_t>(w_.begin) + static_cast<std::uint64_t>(q * kSplit);
          hi_[j][q] = coef_[j] * phase_to_cplx(n * *ph);
        }
      } else {
        dense_[j].resize(size_);
        for (std::size_t i = 0; i < size_; ++i) dense_[j][i] = s(w_.begin + static_cast<std::int64_t>(i));
      }
    });
  }

  cplx value(std::size_t j, std::size_t i) const {
    if (exact_[j]) return hi_[j][i / kSplit] * lo_[j][i % kSplit];
    return dense_[j][i];
  }
  bool all_exact() const { return std::all_of(exact_.begin(), exact_.end(), [](bool b) { return b; }); }
  std::size_t size() const { return size_; }
  std::size_t members() const { return exact_.size(); }

 private:
  Window w_;
  std::size_t size_;
  std::vector<bool> exact_;
  std::vector<cplx> coef_;
  std::vector<std::vector<cplx>> lo_, hi_, dense_;
};

// (1/W) Σ f(n) conj(ψ_j(n)) for every j.
std::vector<cplx> project_inner(const std::vector<cplx>& f, const MemberTable& t) {
  std::vector<cplx> out(t.members());
  const auto W = static_cast<long double>(t.size());
  for_each_index(t.members(), [&](std::size_t j) {
    lcplx s = 0.0L;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const cplx p = f[i] * std::conj(t.value(j, i));
      s += lcplx(p.real(), p.imag());
    }
    s /= W;
    out[j] = cplx(static_cast<double>(s.real()), static_cast<double>(s.imag()));
  });
  return out;
}

// (1/W) Σ_{n=M}^{M+W-1} e(nΔ) in closed form.
lcplx geometric_mean(std::uint64_t delta, std::int64_t M, std::size_t W) {
  if (delta == 0) return 1.0L;
  const auto sd = static_cast<std::int64_t>(delta);
  const long double x = std::ldexp(static_cast<long double>(sd), -64);
  const int128 half = static_cast<int128>(sd) * static_cast<int128>(W - 1) / 2;
  const std::uint64_t phase = static_cast<std::uint64_t>(M) * delta + static_cast<std::uint64_t>(static_cast<uint128>(half));
  const long double pi = std::numbers::pi_v<long double>;
  const long double ratio = std::sin(pi * x * static_cast<long double>(W)) / std::sin(pi * x);
  const cplx e = phase_to_cplx(phase);
  return lcplx(e.real(), e.imag()) * (ratio / static_cast<long double>(W));
}

// Entry (i, j) is ⟨ψ_j, ψ_i⟩, the matrix of the normal equations.
Eigen::MatrixXcd build_gram(const NilBasis& basis, const MemberTable& t, Window w) {
  const std::size_t B = basis.size();
  Eigen::MatrixXcd G(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(B));
  if (t.all_exact()) {
    std::vector<std::uint64_t> ph(B);
    std::vector<cplx> c(B);
    for (std::size_t j = 0; j < B; ++j) {
      ph[j] = *basis.members[j].seq.exact_phase();
      c[j] = basis.members[j].seq.exact_coef();
    }
    for_each_index(B, [&](std::size_t i) {
      for (std::size_t j = 0; j < B; ++j) {
        const lcplx g = geometric_mean(ph[j] - ph[i], w.begin, t.size());
        const cplx cc = c[j] * std::conj(c[i]);
        G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            cc * cplx(static_cast<double>(g.real()), static_cast<double>(g.imag()));
      }
    });
  } else {
    for_each_index(B, [&](std::size_t i) {
      for (std::size_t j = 0; j < B; ++j) {
        lcplx s = 0.0L;
        for (std::size_t n = 0; n < t.size(); ++n) {
          const cplx p = t.value(j, n) * std::conj(t.value(i, n));
          s += lcplx(p.real(), p.imag());
        }
        s /= static_cast<long double>(t.size());
        G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            cplx(static_cast<double>(s.real()), static_cast<double>(s.imag()));
      }
    });
  }
  return G;
}

std::vector<cplx> synthesize_table(const MemberTable& t, const std::vector<cplx>& c) {
  std::vector<cplx> out(t.size());
  for_each_index(t.size(), [&](std::size_t i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j] != cplx(0.0)) s += c[j] * t.value(j, i);
    }
    out[i] = s;
  });
  return out;
}

double l2_mean(const std::vector<cplx>& v) {
  if (v.empty()) return 0.0;
  const long double s = deterministic_sum<long double>(v.size(), [&](std::size_t i) { return static_cast<long double>(std::norm(v[i])); });
  return static_cast<double>(std::sqrt(s / static_cast<long double>(v.size())));
}

double sup_abs(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

std::vector<cplx> synthesize(const NilBasis& basis, const std::vector<cplx>& coefficients, Window window) {
  if (coefficients.size() != basis.size()) throw InvalidInput("one coefficient per basis member");
  MemberTable t(basis, window);
  return synthesize_table(t, coefficients);
}

GramProjection gram_project(const SequenceSample& a, const NilBasis& basis) {
  const std::size_t W = static_cast<std::size_t>(a.window.length());
  if (a.values.size() != W) throw InvalidInput("sample size does not match its window");
  if (W < 10 * basis.size()) throw InsufficientWindow("window must be at least 10 times the basis size");

  GramProjection p;
  p.basis = basis;
  p.window = a.window;
  const std::size_t B = basis.size();
  if (B == 0) {
    p.nil_part.assign(W, 0.0);
    p.residual = a.values;
    p.residual_l2 = l2_mean(p.residual);
    return p;
  }
  MemberTable t(basis, a.window);
  p.gram = build_gram(basis, t, a.window);
  p.inner = project_inner(a.values, t);

  Eigen::VectorXcd b(static_cast<Eigen::Index>(B));
  for (std::size_t j = 0; j < B; ++j) b(static_cast<Eigen::Index>(j)) = p.inner[j];

  Eigen::LDLT<Eigen::MatrixXcd> ldlt(p.gram);
  p.rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  Eigen::MatrixXcd A = p.gram;
  if (!(p.rcond >= kRcondThreshold)) {
    p.ridge = 1e-8 * p.gram.trace().real() / static_cast<double>(B);
    A += p.ridge * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(B));
    ldlt.compute(A);
    p.ridge_flagged = true;
  }
  Eigen::VectorXcd c = ldlt.solve(b);
  // One step of iterative refinement.
  c += ldlt.solve(b - A * c);

  p.coefficients.resize(B);
  for (std::size_t j = 0; j < B; ++j) p.coefficients[j] = c(static_cast<Eigen::Index>(j));
  p.nil_part = synthesize_table(t, p.coefficients);
  p.residual.resize(W);
  for (std::size_t i = 0; i < W; ++i) p.residual[i] = a.values[i] - p.nil_part[i];
  p.residual_l2 = l2_mean(p.residual);
  return p;
}

std::vector<double> residual_orthogonality(const GramProjection& proj) {
  if (proj.basis.size() == 0) return {};
  MemberTable t(proj.basis, proj.window);
  const auto inner = project_inner(proj.residual, t);
  std::vector<double> out(inner.size());
  for (std::size_t j = 0; j < inner.size(); ++j) out[j] = std::abs(inner[j]);
  return out;
}

namespace {

struct Candidate {
  std::string source;
  std::vector<cplx> coefficients;
  std::vector<std::string> tags;
  std::vector<cplx> nil;
  double rescale = 1.0;
  double residual = 0.0;
};

Candidate make_candidate(std::string source, const SequenceSample& a, std::vector<cplx> nil,
                         std::vector<cplx> coefficients, std::vector<std::string> tags) {
  Candidate c{std::move(source), std::move(coefficients), std::move(tags), std::move(nil), 1.0, 0.0};
  const double sup = sup_abs(c.nil);
  if (sup > 1.0) {
    c.rescale = 1.0 / sup;
    for (auto& x : c.nil) x *= c.rescale;
    for (auto& x : c.coefficients) x *= c.rescale;
  }
  std::vector<cplx> e(c.nil.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.values[i] - c.nil[i];
  c.residual = l2_mean(e);
  return c;
}

}  // namespace

DecompositionReport decompose(const SequenceSample& a, const std::vector<NilBasis>& ladder, double epsilon,
                              bool run_all) {
  if (ladder.empty()) throw InvalidInput("decompose needs a non-empty basis ladder");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  DecompositionReport rep;
  rep.epsilon = epsilon;
  rep.window = a.window;

  Candidate best;
  bool have_best = false;
  std::vector<double> best_margins;
  auto commit = [&](const Candidate& c, const std::vector<double>& margins) {
    rep.residual = c.residual;
    rep.rescale = c.rescale;
    rep.source = c.source;
    rep.coefficients = c.coefficients;
    rep.tags = c.tags;
    rep.nil_part = c.nil;
    rep.nil_sup = sup_abs(c.nil);
    rep.margins = margins;
    rep.error.resize(c.nil.size());
    for (std::size_t i = 0; i < c.nil.size(); ++i) rep.error[i] = a.values[i] - c.nil[i];
  };

  for (std::size_t idx = 0; idx < ladder.size(); ++idx) {
    const NilBasis& basis = ladder[idx];
    GramProjection proj = gram_project(a, basis);
    const auto margins = residual_orthogonality(proj);
    std::vector<std::string> tags;
    for (const auto& m : basis.members) tags.push_back(m.tag);

    Candidate raw = make_candidate("raw", a, proj.nil_part, proj.coefficients, tags);
    std::vector<cplx> weighted(proj.coefficients.size());
    for (std::size_t j = 0; j < weighted.size(); ++j) weighted[j] = proj.coefficients[j] * basis.members[j].fejer_weight;
    Candidate fejer = make_candidate("fejer", a, synthesize(basis, weighted, a.window), weighted, tags);

    Candidate chosen = raw;
    if (fejer.residual < chosen.residual) chosen = fejer;
    if (have_best && best.residual < chosen.residual) {
      chosen = best;
      chosen.source = "carried";
    }
    best = chosen;
    have_best = true;
    best_margins = margins;

    LadderRow row;
    row.index = idx;
    row.basis_size = basis.size();
    row.residual_raw = raw.residual;
    row.residual_fejer = fejer.residual;
    row.residual = chosen.residual;
    row.source = chosen.source;
    row.max_margin = margins.empty() ? 0.0 : *std::max_element(margins.begin(), margins.end());
    row.ridge_flagged = proj.ridge_flagged;
    rep.ladder.push_back(row);

    if (!rep.certified && chosen.residual <= epsilon) {
      rep.certified = true;
      rep.index = static_cast<std::ptrdiff_t>(idx);
      commit(chosen, margins);
      if (!run_all) return rep;
    }
  }
  if (!rep.certified) commit(best, best_margins);
  return rep;
}

}  // namespace ergolab

#include "ergolab/correlate.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

void CorrelationSpec::validate() const {
  if (observables.size() < 2) throw InvalidInput("a correlation needs f_0 and at least one f_j");
  if (iterates.size() != system.size()) throw InvalidInput("iterate grid needs one row per transformation");
  for (const auto& row : iterates) {
    if (row.size() != m()) throw InvalidInput("iterate grid needs one column per observable f_1..f_m");
  }
  for (const auto& f : observables) {
    if (!(f.space() == system.space())) throw InvalidInput("observable lives on a different space");
    if (f.sup_bound() > 1.0 + 1e-12) throw InvalidInput("observables must satisfy sup-norm <= 1");
  }
}

void CorrelationSpec::check_headroom(std::int64_t max_abs_n) const {
  for (const auto& row : iterates) {
    for (const auto& p : row) p.check_headroom(max_abs_n);
  }
}

Transformation CorrelationSpec::iterate_map(std::size_t j, std::int64_t n) const {
  Transformation s = Transformation::identity(system.space());
  for (std::size_t i = 0; i < ell(); ++i) {
    const std::int64_t e = eval_floor(iterates[i][j], n);
    if (e != 0) s = system.map(i).power(e).compose(s);
  }
  return s;
}

namespace {

std::vector<Transformation> maps_at(const CorrelationSpec& spec, std::int64_t n) {
  std::vector<Transformation> maps;
  maps.reserve(spec.m());
  for (std::size_t j = 0; j < spec.m(); ++j) maps.push_back(spec.iterate_map(j, n));
  return maps;
}

cplx product_at(const CorrelationSpec& spec, const std::vector<Transformation>& maps, const StatePoint& x,
                bool with_f0) {
  cplx v = with_f0 ? spec.observables[0](x) : cplx(1.0);
  StatePoint y{std::vector<std::uint64_t>(x.coords.size())};
  for (std::size_t j = 0; j < maps.size(); ++j) {
    maps[j].apply(x.coords.data(), y.coords.data());
    v *= spec.observables[j + 1](y);
  }
  return v;
}

// Spectrum of ∏_j f_j ∘ S_j, accumulated into acc with the given weight.
void accumulate_product_spectrum(const CorrelationSpec& spec, const std::vector<Transformation>& maps,
                                 long double weight, SpectrumMap& acc) {
  Observable prod = spec.observables[1].compose(maps[0]);
  for (std::size_t j = 1; j < maps.size(); ++j) prod = prod * spec.observables[j + 1].compose(maps[j]);
  for (const auto& t : prod.terms()) acc[t.freq] += t.coef * weight;
}

double spectrum_l2(const SpectrumMap& m) {
  long double s = 0.0L;
  for (const auto& [k, c] : m) s += std::norm(c);
  return static_cast<double>(std::sqrt(s));
}

}  // namespace

static cplx correlation_for_maps(const CorrelationSpec& spec, const std::vector<Transformation>& maps, Route route) {
  if (route == Route::Spectral) {
    std::vector<Observable> factors{spec.observables[0]};
    for (std::size_t j = 0; j < maps.size(); ++j) factors.push_back(spec.observables[j + 1].compose(maps[j]));
    return spectral_integral(factors);
  }
  const auto& pts = spec.system.points();
  const lcplx s = deterministic_sum<lcplx>(pts.size(), [&](std::size_t i) {
    const cplx v = product_at(spec, maps, pts[i], true);
    return lcplx(v.real(), v.imag());
  });
  const lcplx mean = s / static_cast<long double>(pts.size());
  return {static_cast<double>(mean.real()), static_cast<double>(mean.imag())};
}

cplx correlation_at(const CorrelationSpec& spec, std::int64_t n, Route route) {
  return correlation_for_maps(spec, maps_at(spec, n), route);
}

cplx correlation_for_exponents(const CorrelationSpec& spec, const std::vector<std::vector<std::int64_t>>& e,
                               Route route) {
  if (e.size() != spec.ell()) throw InvalidInput("exponent grid needs one row per transformation");
  std::vector<Transformation> maps;
  for (std::size_t j = 0; j < spec.m(); ++j) {
    Transformation s = Transformation::identity(spec.system.space());
    for (std::size_t i = 0; i < spec.ell(); ++i) {
      if (e[i].size() != spec.m()) throw InvalidInput("exponent grid needs one column per observable");
      if (e[i][j] != 0) s = spec.system.map(i).power(e[i][j]).compose(s);
    }
    maps.push_back(std::move(s));
  }
  return correlation_for_maps(spec, maps, route);
}

SequenceSample corr_seq(const CorrelationSpec& spec, Window window, Route route) {
  spec.validate();
  if (window.length() < 1) throw InvalidInput("empty window");
  spec.check_headroom(std::max(std::abs(window.begin), std::abs(window.end)));
  SequenceSample out;
  out.window = window;
  out.values.resize(static_cast<std::size_t>(window.length()));
  out.provenance = route == Route::Spectral ? "spectral" : "sampler:" + spec.system.sampler().describe();
  if (route == Route::Spectral) {
    for_each_chunk(out.values.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out.values[i] = correlation_at(spec, window.begin + static_cast<std::int64_t>(i), route);
    });
  } else {
    // Parallelism lives inside the per-n sum.
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] = correlation_at(spec, window.begin + static_cast<std::int64_t>(i), route);
    }
  }
  return out;
}

SequenceSample sample_sequence(const SequenceFn& a, Window window, std::string provenance) {
  if (window.length() < 1) throw InvalidInput("empty window");
  SequenceSample out;
  out.window = window;
  out.provenance = std::move(provenance);
  out.values.resize(static_cast<std::size_t>(window.length()));
  for_each_chunk(out.values.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out.values[i] = a(window.begin + static_cast<std::int64_t>(i));
  });
  return out;
}

MultiAverage multi_average(const CorrelationSpec& spec, Window window) {
  spec.validate();
  if (window.length() < 1) throw InvalidInput("empty window");
  spec.check_headroom(std::max(std::abs(window.begin), std::abs(window.end)));
  const auto len = static_cast<std::size_t>(window.length());
  std::vector<std::vector<Transformation>> maps(len);
  for_each_chunk(len, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) maps[i] = maps_at(spec, window.begin + static_cast<std::int64_t>(i));
  });

  MultiAverage out;
  out.window = window;
  const auto& pts = spec.system.points();
  out.samples = pts.size();
  out.values.resize(pts.size());
  for_each_chunk(pts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      lcplx s = 0.0L;
      for (std::size_t i = 0; i < len; ++i) {
        const cplx v = product_at(spec, maps[i], pts[p], false);
        s += lcplx(v.real(), v.imag());
      }
      s /= static_cast<long double>(len);
      out.values[p] = {static_cast<double>(s.real()), static_cast<double>(s.imag())};
    }
  });
  const auto n = static_cast<long double>(pts.size());
  const long double mean_sq =
      deterministic_sum<long double>(pts.size(), [&](std::size_t p) { return static_cast<long double>(std::norm(out.values[p])); }) / n;
  out.l2_sampled = static_cast<double>(std::sqrt(mean_sq));
  if (!spec.system.exact_measure() && pts.size() > 1) {
    const long double var = deterministic_sum<long double>(pts.size(), [&](std::size_t p) {
                              const long double d = std::norm(out.values[p]) - mean_sq;
                              return d * d;
                            }) / (n - 1);
    const double se_mean = static_cast<double>(std::sqrt(var / n));
    out.l2_std_error = out.l2_sampled > 0 ? se_mean / (2.0 * out.l2_sampled) : std::sqrt(se_mean);
  }

  SpectrumMap acc;
  const long double w = 1.0L / static_cast<long double>(len);
  for (std::size_t i = 0; i < len; ++i) accumulate_product_spectrum(spec, maps[i], w, acc);
  out.l2_spectral = spectrum_l2(acc);
  return out;
}

CauchyReport cauchy_report(const CorrelationSpec& spec, std::int64_t begin, std::int64_t base_length, int steps,
                           double tolerance) {
  spec.validate();
  if (steps < 4) throw InvalidInput("a Cauchy ladder needs at least 4 windows");
  if (base_length < 1) throw InvalidInput("ladder base length must be positive");
  const std::int64_t last_end = begin + (base_length << (steps - 1));
  spec.check_headroom(std::max(std::abs(begin), std::abs(last_end)));

  CauchyReport report;
  report.tolerance = tolerance;
  SpectrumMap running;
  std::vector<SpectrumMap> snapshots;
  std::vector<Window> windows;
  std::int64_t n = begin;
  for (int k = 0; k < steps; ++k) {
    const std::int64_t end = begin + (base_length << k);
    for (; n < end; ++n) accumulate_product_spectrum(spec, maps_at(spec, n), 1.0L, running);
    SpectrumMap avg = running;
    const long double inv = 1.0L / static_cast<long double>(end - begin);
    for (auto& [key, c] : avg) c *= inv;
    snapshots.push_back(std::move(avg));
    windows.push_back({begin, end});
  }
  for (int k = 0; k + 1 < steps; ++k) {
    SpectrumMap diff = snapshots[k + 1];
    for (const auto& [key, c] : snapshots[k]) diff[key] -= c;
    report.rows.push_back({windows[k], windows[k + 1], spectrum_l2(diff)});
  }
  const auto& r = report.rows;
  report.converged = r.size() >= 2 && r[r.size() - 1].diff_l2 <= tolerance && r[r.size() - 2].diff_l2 <= tolerance;
  return report;
}

void WindowFamily::validate() const {
  if (windows.size() < 3) throw InvalidInput("a window family needs at least 3 windows");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].length() < 1) throw InvalidInput("empty window in family");
    if (i > 0 && windows[i].length() <= windows[i - 1].length()) {
      throw InvalidInput("window lengths must be strictly increasing");
    }
  }
}

WindowFamily WindowFamily::lengths(std::int64_t begin, const std::vector<std::int64_t>& lengths) {
  WindowFamily f;
  for (auto l : lengths) f.windows.push_back({begin, begin + l});
  return f;
}

UniformSeminormReport uniform_seminorm(const SequenceFn& a, const WindowFamily& family) {
  family.validate();
  UniformSeminormReport out;
  out.squared = -1.0;
  const std::size_t count = family.windows.size();
  for (std::size_t w = count - 2; w < count; ++w) {
    const Window base = family.windows[w];
    const std::int64_t len = base.length();
    for (std::int64_t shift : {std::int64_t{0}, len / 2, len, 2 * len}) {
      const Window win{base.begin + shift, base.end + shift};
      const long double s = deterministic_sum<long double>(static_cast<std::size_t>(len), [&](std::size_t i) {
        return static_cast<long double>(std::norm(a(win.begin + static_cast<std::int64_t>(i))));
      });
      const double mean = static_cast<double>(s / static_cast<long double>(len));
      if (mean > out.squared) {
        out.squared = mean;
        out.argmax = win;
      }
    }
  }
  out.value = std::sqrt(out.squared);
  return out;
}

}  // namespace ergolab

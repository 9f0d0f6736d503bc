#pragma once

// Brute-force reference implementations. They share no arithmetic with the
// library: plain int64 modular maps, cpp_int rationals, direct iteration.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using big = boost::multiprecision::cpp_int;
using cd = std::complex<double>;

struct Frac {
  big num;
  big den = 1;
};

// ⌊Σ c_i n^i⌋ for rational coefficients.
inline big floor_poly(const std::vector<Frac>& c, std::int64_t n) {
  big num = 0, den = 1;
  big pw = 1;
  for (const auto& f : c) {
    num = num * f.den + f.num * pw * den;
    den *= f.den;
    pw *= n;
  }
  big q = num / den;
  if (num % den != 0 && ((num < 0) != (den < 0))) --q;
  return q;
}

// ⌊Σ r_i n^i / 2^64⌋ for coefficients given by their raw fixed-point words.
inline big floor_poly_raw(const std::vector<big>& raw, std::int64_t n) {
  big s = 0, pw = 1;
  for (const auto& r : raw) {
    s += r * pw;
    pw *= n;
  }
  const big d = big(1) << 64;
  big q = s / d;
  if (s % d != 0 && s < 0) --q;
  return q;
}

inline cd e(double t) { return std::polar(1.0, 2.0 * M_PI * (t - std::floor(t))); }

// x ↦ A x + b on (ℤ_q)^d.
struct ModMap {
  std::int64_t q = 1;
  std::vector<std::vector<std::int64_t>> A;
  std::vector<std::int64_t> b;

  std::vector<std::int64_t> operator()(const std::vector<std::int64_t>& x) const {
    std::vector<std::int64_t> y(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) {
      std::int64_t s = b.empty() ? 0 : b[r];
      for (std::size_t c = 0; c < x.size(); ++c) s += A[r][c] * x[c];
      y[r] = ((s % q) + q) % q;
    }
    return y;
  }
};

inline ModMap shift(std::int64_t q, std::int64_t r) { return {q, {{1}}, {r}}; }

struct FiniteSystem {
  std::int64_t q;
  int d;
  std::vector<std::vector<std::int64_t>> points;

  FiniteSystem(std::int64_t q_, int d_) : q(q_), d(d_) {
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= q;
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::vector<std::int64_t> x(static_cast<std::size_t>(d));
      std::int64_t r = idx;
      for (int i = d - 1; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] = r % q;
        r /= q;
      }
      points.push_back(x);
    }
  }

  std::size_t index(const std::vector<std::int64_t>& x) const {
    std::size_t idx = 0;
    for (auto v : x) idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(v);
    return idx;
  }

  // Permutation table of a map.
  std::vector<std::size_t> table(const ModMap& m) const {
    std::vector<std::size_t> t(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) t[i] = index(m(points[i]));
    return t;
  }

  // Order of a permutation, by iterating until every point returns.
  static std::int64_t order(const std::vector<std::size_t>& t) {
    std::int64_t ord = 1;
    std::vector<bool> seen(t.size(), false);
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (seen[s]) continue;
      std::int64_t len = 0;
      std::size_t x = s;
      do {
        seen[x] = true;
        x = t[x];
        ++len;
      } while (x != s);
      ord = std::lcm(ord, len);
    }
    return ord;
  }

  // t^e applied to point i by single steps.
  static std::size_t power(const std::vector<std::size_t>& t, std::int64_t ord, big e, std::size_t i) {
    big r = e % ord;
    if (r < 0) r += ord;
    auto steps = static_cast<std::int64_t>(r);
    for (std::int64_t k = 0; k < steps; ++k) i = t[i];
    return i;
  }
};

using PointFn = std::function<cd(const std::vector<std::int64_t>&)>;

// a(n) = (1/|X|) Σ_x f_0(x) ∏_j f_j(∏_i T_i^{⌊p_ij(n)⌋} x)
inline cd correlation(const FiniteSystem& X, const std::vector<ModMap>& maps,
                      const std::vector<std::vector<std::vector<Frac>>>& grid, const std::vector<PointFn>& f,
                      std::int64_t n) {
  std::vector<std::vector<std::size_t>> tabs;
  std::vector<std::int64_t> ords;
  for (const auto& m : maps) {
    tabs.push_back(X.table(m));
    ords.push_back(FiniteSystem::order(tabs.back()));
  }
  cd sum = 0.0;
  for (std::size_t x = 0; x < X.points.size(); ++x) {
    cd term = f[0](X.points[x]);
    for (std::size_t j = 0; j + 1 < f.size(); ++j) {
      std::size_t y = x;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        y = FiniteSystem::power(tabs[i], ords[i], floor_poly(grid[i][j], n), y);
      }
      term *= f[j + 1](X.points[y]);
    }
    sum += term;
  }
  return sum / static_cast<double>(X.points.size());
}

// |||f|||_k^{2^k} by the cube average over full periods.
inline double hk_power(const std::vector<cd>& f, const std::vector<std::size_t>& t, int k) {
  const std::int64_t P = FiniteSystem::order(t);
  const std::size_t X = f.size();
  // tp[m][x] = T^m x
  std::vector<std::vector<std::size_t>> tp(static_cast<std::size_t>(P), std::vector<std::size_t>(X));
  for (std::size_t x = 0; x < X; ++x) tp[0][x] = x;
  for (std::int64_t m = 1; m < P; ++m) {
    for (std::size_t x = 0; x < X; ++x) tp[static_cast<std::size_t>(m)][x] = t[tp[static_cast<std::size_t>(m - 1)][x]];
  }
  std::vector<std::int64_t> n(static_cast<std::size_t>(k), 0);
  cd total = 0.0;
  std::int64_t count = 0;
  while (true) {
    for (std::size_t x = 0; x < X; ++x) {
      cd prod = 1.0;
      for (std::uint32_t eps = 0; eps < (1u << k); ++eps) {
        std::int64_t s = 0;
        int bits = 0;
        for (int i = 0; i < k; ++i) {
          if (eps >> i & 1) {
            s += n[static_cast<std::size_t>(i)];
            ++bits;
          }
        }
        const cd v = f[tp[static_cast<std::size_t>(s % P)][x]];
        prod *= (bits % 2) ? std::conj(v) : v;
      }
      total += prod;
    }
    ++count;
    int i = 0;
    while (i < k && ++n[static_cast<std::size_t>(i)] == P) n[static_cast<std::size_t>(i++)] = 0;
    if (i == k) break;
  }
  return (total / (static_cast<double>(count) * static_cast<double>(X))).real();
}

// (1/N) Σ_{n<N} f(T^n x) by direct iteration.
inline std::vector<cd> birkhoff(const std::vector<cd>& f, const std::vector<std::size_t>& t, std::int64_t N) {
  std::vector<cd> out(f.size());
  for (std::size_t x0 = 0; x0 < f.size(); ++x0) {
    cd s = 0.0;
    std::size_t x = x0;
    for (std::int64_t n = 0; n < N; ++n) {
      s += f[x];
      x = t[x];
    }
    out[x0] = s / static_cast<double>(N);
  }
  return out;
}

}  // namespace oracle

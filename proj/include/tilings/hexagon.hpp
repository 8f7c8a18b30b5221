#pragma once

// Rhombus tilings of the abc-hexagon as c non-intersecting +-1 walks,
// exact counts and column laws, enumeration, exact and MCMC sampling, and
// the boxed plane partition read off the hole positions.

#include "tilings/linalg.hpp"
#include "tilings/ope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace tilings {

struct ColumnBounds {
  int alpha = 0, beta = 0, gamma = 0, L = 0, delta = 0;
};

struct HexagonSpec {
  int a = 1, b = 1, c = 1;

  HexagonSpec() = default;
  HexagonSpec(int a_, int b_, int c_) : a(a_), b(b_), c(c_) {
    require(a >= 1 && b >= 1 && c >= 1, "domain", "hexagon sides must be positive");
  }
  int width() const { return a + b; }

  // alpha_m = max(-m, m-2b), beta_m = min(m, 2a-m) + 2(c-1); for a >= b
  // these are the printed piecewise formulas.
  ColumnBounds column(int m) const {
    require(m >= 0 && m <= a + b, "domain",
            "column " + std::to_string(m) + " outside 0.." + std::to_string(a + b));
    ColumnBounds cb;
    cb.alpha = std::max(-m, m - 2 * b);
    cb.beta = std::min(m, 2 * a - m) + 2 * (c - 1);
    cb.gamma = (cb.beta - cb.alpha) / 2;
    cb.L = cb.gamma + 1 - c;
    cb.delta = (m + cb.alpha) / 2;
    return cb;
  }
  int start(int k) const { return 2 * (k - 1); }
  int finish(int k) const { return a - b + 2 * (k - 1); }
};

inline ColumnBounds column_bounds(const HexagonSpec& h, int m) { return h.column(m); }

// ---------------------------------------------------------------------------
// Counting

// MacMahon's triple product, evaluated as an exact rational.
inline BigInt macmahon(int a, int b, int c) {
  require(a >= 0 && b >= 0 && c >= 0, "domain", "MacMahon arguments must be nonnegative");
  Rational r = 1;
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= b; ++j)
      for (int k = 1; k <= c; ++k) r *= Rational(i + j + k - 1, i + j + k - 2);
  require(denominator(r) == 1, "internal", "MacMahon product is not an integer");
  return numerator(r);
}

// prod_{j<b} j! (a+c+j)! / ((a+j)! (c+j)!).
inline BigInt macmahon_closed_form(int a, int b, int c) {
  Rational r = 1;
  for (int j = 0; j < b; ++j)
    r *= Rational(factorial(j) * factorial(a + c + j), factorial(a + j) * factorial(c + j));
  require(denominator(r) == 1, "internal", "MacMahon closed form is not an integer");
  return numerator(r);
}

namespace detail {

inline BigInt walk_paths(int steps, int from, int to) {
  int d = to - from;
  if ((steps + d) % 2 != 0 || std::abs(d) > steps) return 0;
  return binomial(steps, (steps + d) / 2);
}

inline void require_particles(const HexagonSpec& h, int m, const std::vector<int>& x) {
  const auto cb = h.column(m);
  require(static_cast<int>(x.size()) == h.c, "validation", "column needs exactly c particles");
  for (std::size_t k = 0; k < x.size(); ++k) {
    require(x[k] >= 0 && x[k] <= cb.gamma, "validation", "particle outside 0..gamma_m");
    require(k == 0 || x[k] > x[k - 1], "validation", "particles must be strictly increasing");
  }
}

}  // namespace detail

// A_m(x): non-intersecting walks from the starts to (m, 2x_k + alpha_m),
// det(binom(m, delta_m + x_k - j + 1)).
inline BigInt lgv_count(const HexagonSpec& h, int m, const std::vector<int>& x) {
  detail::require_particles(h, m, x);
  const auto cb = h.column(m);
  const int c = h.c;
  BigMatrix M(c, std::vector<BigInt>(c));
  for (int j = 1; j <= c; ++j)
    for (int k = 1; k <= c; ++k) M[j - 1][k - 1] = binomial(m, cb.delta + x[k - 1] - j + 1);
  return bareiss_det(M);
}

// Non-intersecting completions from column m to the ending points.
inline BigInt lgv_suffix_count(const HexagonSpec& h, int m, const std::vector<int>& x) {
  detail::require_particles(h, m, x);
  const auto cb = h.column(m);
  const int c = h.c, steps = h.width() - m;
  BigMatrix M(c, std::vector<BigInt>(c));
  for (int j = 1; j <= c; ++j)
    for (int k = 1; k <= c; ++k)
      M[k - 1][j - 1] = detail::walk_paths(steps, 2 * x[k - 1] + cb.alpha, h.finish(j));
  return bareiss_det(M);
}

// ---------------------------------------------------------------------------
// Column laws

struct ColumnConfig {
  int m = 0;
  std::vector<int> particles, holes;
};

inline std::vector<int> complement_sites(const std::vector<int>& sites, int top) {
  std::vector<int> out;
  std::size_t i = 0;
  for (int s = 0; s <= top; ++s) {
    if (i < sites.size() && sites[i] == s)
      ++i;
    else
      out.push_back(s);
  }
  return out;
}

struct ColumnLawEntry {
  ColumnConfig config;
  Rational prob;
};

inline constexpr std::size_t kMaxColumnConfigs = 200000;

namespace detail {

inline void for_each_subset(int top, int size, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> s;
  auto rec = [&](auto&& self, int from) -> void {
    if (static_cast<int>(s.size()) == size) {
      f(s);
      return;
    }
    for (int x = from; x <= top - (size - static_cast<int>(s.size()) - 1); ++x) {
      s.push_back(x);
      self(self, x + 1);
      s.pop_back();
    }
  };
  rec(rec, 0);
}

inline void require_tabulable(const HexagonSpec& h, int m) {
  const auto cb = h.column(m);
  BigInt n = binomial(cb.gamma + 1, cb.L);
  require(n <= BigInt(kMaxColumnConfigs), "refused",
          "column " + std::to_string(m) + " has " + n.str() + " configurations (limit " +
              std::to_string(kMaxColumnConfigs) + ")");
}

}  // namespace detail

// Exact law of column m as A_m(x) B_m(x) / N(a,b,c), listing every
// configuration with positive probability in lexicographic hole order.
inline std::vector<ColumnLawEntry> column_law(const HexagonSpec& h, int m) {
  detail::require_tabulable(h, m);
  const auto cb = h.column(m);
  const Rational total = Rational(macmahon(h.a, h.b, h.c));
  std::vector<ColumnLawEntry> out;
  detail::for_each_subset(cb.gamma, cb.L, [&](const std::vector<int>& holes) {
    ColumnConfig cfg{m, complement_sites(holes, cb.gamma), holes};
    BigInt w = lgv_count(h, m, cfg.particles) * lgv_suffix_count(h, m, cfg.particles);
    out.push_back({cfg, Rational(w) / total});
  });
  return out;
}

// Sum over column m of A_m(x) B_m(x); equals N(a,b,c) for every m.
inline BigInt lgv_total(const HexagonSpec& h, int m) {
  detail::require_tabulable(h, m);
  BigInt total = 0;
  detail::for_each_subset(h.column(m).gamma, h.c, [&](const std::vector<int>& x) {
    total += lgv_count(h, m, x) * lgv_suffix_count(h, m, x);
  });
  return total;
}

// Hahn parameters (a_m, b_m) = (|a-m|, |b-m|). For a < b the hole law is the
// reflected ensemble xi -> gamma_m - xi with the parameters exchanged.
struct ColumnEnsemble {
  int N = 0, size = 0, alpha = 0, beta = 0;
  bool reflected = false;
};

inline ColumnEnsemble hole_ensemble(const HexagonSpec& h, int m) {
  const auto cb = h.column(m);
  ColumnEnsemble e{cb.gamma, cb.L, std::abs(h.a - m), std::abs(h.b - m), false};
  if (h.a < h.b) {
    e.reflected = true;
    std::swap(e.alpha, e.beta);
  }
  return e;
}

inline std::vector<int> reflect_sites(std::vector<int> s, int top) {
  for (int& x : s) x = top - x;
  std::reverse(s.begin(), s.end());
  return s;
}

// Hahn ensemble probability of the holes (unordered configuration).
inline Rational hahn_hole_prob(const HexagonSpec& h, int m, const std::vector<int>& holes) {
  auto e = hole_ensemble(h, m);
  auto xi = e.reflected ? reflect_sites(holes, e.N) : holes;
  Rational w = vandermonde_squared(xi);
  for (int x : xi) w *= hahn_weight_exact(e.N, e.alpha, e.beta, x);
  return w * Rational(factorial(e.size)) / hahn_partition_exact(e.N, e.size, e.alpha, e.beta);
}

// Associated Hahn law of the particles, normalized by direct summation.
inline std::vector<Rational> associated_hahn_particle_law(const HexagonSpec& h, int m,
                                                          const std::vector<ColumnLawEntry>& law) {
  auto e = hole_ensemble(h, m);
  std::vector<Rational> w;
  Rational z = 0;
  detail::for_each_subset(e.N, h.c, [&](const std::vector<int>& x) {
    Rational v = vandermonde_squared(x);
    for (int s : x) v *= associated_hahn_weight_exact(e.N, e.alpha, e.beta, s);
    z += v;
  });
  for (const auto& entry : law) {
    auto x = e.reflected ? reflect_sites(entry.config.particles, e.N) : entry.config.particles;
    Rational v = vandermonde_squared(x);
    for (int s : x) v *= associated_hahn_weight_exact(e.N, e.alpha, e.beta, s);
    w.push_back(v / z);
  }
  return w;
}

// Exact column sample of the holes through the Hahn projection DPP.
class ColumnSampler {
 public:
  ColumnSampler(const HexagonSpec& h, int m) : ens_(hole_ensemble(h, m)) {
    if (ens_.size > 0)
      kernel_ = ProjectionKernel(
          build_orthonormal(DiscreteWeight::hahn(ens_.N, ens_.alpha, ens_.beta), ens_.size));
  }
  std::vector<int> sample_holes(Rng& rng) const {
    if (ens_.size == 0) return {};
    auto xi = sample_dpp(kernel_, rng);
    return ens_.reflected ? reflect_sites(xi, ens_.N) : xi;
  }
  const ProjectionKernel& kernel() const { return kernel_; }
  const ColumnEnsemble& ensemble() const { return ens_; }

 private:
  ColumnEnsemble ens_;
  ProjectionKernel kernel_;
};

// ---------------------------------------------------------------------------
// Walk families

// S[k][m] stored flat, k = 0..c-1 (walk k+1), m = 0..a+b.
struct WalkFamily {
  HexagonSpec spec;
  std::vector<int> S;

  WalkFamily() = default;
  explicit WalkFamily(const HexagonSpec& h)
      : spec(h), S(static_cast<std::size_t>(h.c) * (h.width() + 1), 0) {}

  int& at(int k, int m) { return S[static_cast<std::size_t>(k) * (spec.width() + 1) + m]; }
  int at(int k, int m) const { return S[static_cast<std::size_t>(k) * (spec.width() + 1) + m]; }

  std::vector<int> particles(int m) const {
    const int alpha = spec.column(m).alpha;
    std::vector<int> x(static_cast<std::size_t>(spec.c));
    for (int k = 0; k < spec.c; ++k) x[k] = (at(k, m) - alpha) / 2;
    return x;
  }
  std::vector<int> holes(int m) const { return complement_sites(particles(m), spec.column(m).gamma); }

  bool operator==(const WalkFamily& o) const { return S == o.S; }
  bool operator<(const WalkFamily& o) const { return S < o.S; }
};

inline void validate_walks(const WalkFamily& f) {
  const auto& h = f.spec;
  require(f.S.size() == static_cast<std::size_t>(h.c) * (h.width() + 1), "validation",
          "walk family has the wrong size");
  for (int k = 0; k < h.c; ++k) {
    require(f.at(k, 0) == h.start(k + 1) && f.at(k, h.width()) == h.finish(k + 1), "validation",
            "walk " + std::to_string(k + 1) + " has wrong endpoints");
    for (int m = 0; m <= h.width(); ++m) {
      const auto cb = h.column(m);
      int y = f.at(k, m);
      require(y >= cb.alpha && y <= cb.beta, "validation", "walk leaves the hexagon");
      if (m > 0) require(std::abs(y - f.at(k, m - 1)) == 1, "validation", "walk step is not +-1");
      if (k > 0) require(y > f.at(k - 1, m), "validation", "walks intersect");
    }
  }
}

// Extreme configurations: every walk as low (resp. high) as possible.
inline WalkFamily extreme_walks(const HexagonSpec& h, bool high) {
  WalkFamily f(h);
  for (int k = 0; k < h.c; ++k)
    for (int m = 0; m <= h.width(); ++m) {
      const auto cb = h.column(m);
      f.at(k, m) = high ? cb.beta - 2 * (h.c - 1 - k) : cb.alpha + 2 * k;
    }
  validate_walks(f);
  return f;
}

namespace detail {

// Positions at column m+1 reachable from `cur` at column m.
inline void for_each_step(const HexagonSpec& h, int m, const std::vector<int>& cur,
                          const std::function<void(const std::vector<int>&)>& f) {
  const auto nb = h.column(m + 1);
  const int c = h.c;
  std::vector<int> next(static_cast<std::size_t>(c));
  auto rec = [&](auto&& self, int k) -> void {
    if (k == c) {
      f(next);
      return;
    }
    for (int d : {-1, 1}) {
      int y = cur[k] + d;
      if (y < nb.alpha + 2 * k || y > nb.beta - 2 * (c - 1 - k)) continue;
      if (k > 0 && y <= next[k - 1]) continue;
      next[k] = y;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
}

inline std::vector<int> column_heights(const WalkFamily& f, int m) {
  std::vector<int> y(static_cast<std::size_t>(f.spec.c));
  for (int k = 0; k < f.spec.c; ++k) y[k] = f.at(k, m);
  return y;
}

inline std::vector<int> to_particles(const HexagonSpec& h, int m, const std::vector<int>& y) {
  const int alpha = h.column(m).alpha;
  std::vector<int> x(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) x[k] = (y[k] - alpha) / 2;
  return x;
}

}  // namespace detail

inline constexpr double kMaxEnumerate = 1e7;

inline void require_enumerable(const HexagonSpec& h) {
  BigInt n = macmahon(h.a, h.b, h.c);
  require(n <= BigInt(static_cast<long>(kMaxEnumerate)), "refused",
          "N(a,b,c) = " + n.str() + " exceeds the enumeration limit 1e7; use mcmc");
}

// All tilings, in lexicographic order of the walks.
inline std::vector<WalkFamily> enumerate_hexagon(const HexagonSpec& h) {
  require_enumerable(h);
  std::vector<WalkFamily> out;
  WalkFamily f = extreme_walks(h, false);
  auto rec = [&](auto&& self, int m) -> void {
    if (m == h.width()) {
      for (int k = 0; k < h.c; ++k)
        if (f.at(k, m) != h.finish(k + 1)) return;
      out.push_back(f);
      return;
    }
    detail::for_each_step(h, m, detail::column_heights(f, m), [&](const std::vector<int>& y) {
      for (int k = 0; k < h.c; ++k) f.at(k, m + 1) = y[k];
      self(self, m + 1);
    });
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

// Exact uniform tiling: each column is drawn given the previous one with
// weights proportional to the number of completions.
inline WalkFamily sample_hexagon_exact(const HexagonSpec& h, Rng& rng) {
  require_enumerable(h);
  WalkFamily f(h);
  for (int k = 0; k < h.c; ++k) f.at(k, 0) = h.start(k + 1);
  for (int m = 0; m < h.width(); ++m) {
    std::vector<std::vector<int>> options;
    std::vector<BigInt> weights;
    BigInt total = 0;
    detail::for_each_step(h, m, detail::column_heights(f, m), [&](const std::vector<int>& y) {
      BigInt w = lgv_suffix_count(h, m + 1, detail::to_particles(h, m + 1, y));
      if (w == 0) return;
      options.push_back(y);
      weights.push_back(w);
      total += w;
    });
    require(total > 0, "internal", "exact hexagon sampler reached a dead end");
    // Uniform integer in [0, total) from 64-bit draws; total < 2^63 here.
    const auto t = total.convert_to<std::uint64_t>();
    std::uniform_int_distribution<std::uint64_t> pick(0, t - 1);
    std::uint64_t r = pick(rng);
    std::size_t i = 0;
    for (;; ++i) {
      auto w = weights[i].convert_to<std::uint64_t>();
      if (r < w) break;
      r -= w;
    }
    for (int k = 0; k < h.c; ++k) f.at(k, m + 1) = options[i][k];
  }
  validate_walks(f);
  return f;
}

// ---------------------------------------------------------------------------
// Lozenge-flip Markov chain

struct McmcSchedule {
  long burn_in_sweeps = -1;  // negative: 10 * a * b * c / (a + b) sweeps
  long thin_sweeps = 100;
  bool start_high = false;
};

inline long default_burn_in(const HexagonSpec& h) {
  return 10L * h.a * h.b * h.c / h.width();
}

// Systematic scan over interior (walk, column) sites; each visit flips the
// walk corner with probability 1/2. A corner at (k, m) with S(m-1) = S(m+1)
// moves to the other side when the result stays inside the hexagon and
// strictly between its neighbours. Each visit is reversible for the uniform
// measure on tilings.
class HexagonChain {
 public:
  HexagonChain(const HexagonSpec& h, Rng rng, bool start_high = false)
      : fam_(extreme_walks(h, start_high)), rng_(std::move(rng)) {
    for (int m = 0; m <= h.width(); ++m) {
      auto cb = h.column(m);
      lo_.push_back(cb.alpha);
      hi_.push_back(cb.beta);
    }
  }

  void sweep(long count = 1) {
    const auto& h = fam_.spec;
    const int W = h.width(), stride = W + 1;
    if (W < 2) return;
    int* S = fam_.S.data();
    std::uint64_t bits = 0;
    int left = 0;
    for (long s = 0; s < count; ++s) {
      for (int k = 0; k < h.c; ++k) {
        int* row = S + static_cast<std::ptrdiff_t>(k) * stride;
        const int* below = k > 0 ? row - stride : nullptr;
        const int* above = k + 1 < h.c ? row + stride : nullptr;
        for (int m = 1; m < W; ++m) {
          if (left == 0) {
            bits = rng_();
            left = 64;
          }
          const bool coin = bits & 1;
          bits >>= 1;
          --left;
          if (!coin || row[m - 1] != row[m + 1]) continue;
          int y = 2 * row[m - 1] - row[m];
          if (y < lo_[m] || y > hi_[m]) continue;
          if (below && y <= below[m]) continue;
          if (above && y >= above[m]) continue;
          row[m] = y;
        }
      }
    }
  }

  const WalkFamily& state() const { return fam_; }

 private:
  WalkFamily fam_;
  Rng rng_;
  std::vector<int> lo_, hi_;
};

// Runs one chain: burn-in, then `samples` states separated by thin sweeps.
inline std::vector<WalkFamily> sample_hexagon_mcmc(const HexagonSpec& h, int samples,
                                                   const McmcSchedule& sched, Rng& rng) {
  require(samples >= 0, "domain", "sample count must be nonnegative");
  require(sched.thin_sweeps >= 1, "domain", "thinning must be at least one sweep");
  HexagonChain chain(h, Rng(rng()), sched.start_high);
  chain.sweep(sched.burn_in_sweeps < 0 ? default_burn_in(h) : sched.burn_in_sweeps);
  std::vector<WalkFamily> out;
  for (int i = 0; i < samples; ++i) {
    if (i > 0) chain.sweep(sched.thin_sweeps);
    out.push_back(chain.state());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plane partitions

// H(r_m - k, s_m - k) = X_m(k) - k + 1 with X_m(k) the k-th hole; returned
// as H[x][y], 0 <= x < a, 0 <= y < b. Requires a >= b.
inline std::vector<std::vector<int>> plane_partition_height(const WalkFamily& f) {
  validate_walks(f);
  const auto& h = f.spec;
  require(h.a >= h.b, "domain", "plane partition heights are defined for a >= b");
  std::vector<std::vector<int>> H(h.a, std::vector<int>(h.b, -1));
  for (int m = 0; m <= h.width(); ++m) {
    const int r = m <= h.b ? h.a : h.a + h.b - m;
    const int s = m <= h.b ? m : h.b;
    auto xi = f.holes(m);
    for (int k = 1; k <= static_cast<int>(xi.size()); ++k) {
      int x = r - k, y = s - k;
      require(x >= 0 && x < h.a && y >= 0 && y < h.b, "validation", "hole maps outside the box");
      require(H[x][y] < 0, "validation", "two holes map to the same box cell");
      H[x][y] = xi[k - 1] - k + 1;
    }
  }
  for (auto& row : H)
    for (int v : row) require(v >= 0 && v <= h.c, "validation", "inconsistent column heights");
  return H;
}

inline bool is_boxed_plane_partition(const std::vector<std::vector<int>>& H, int c) {
  for (std::size_t x = 0; x < H.size(); ++x)
    for (std::size_t y = 0; y < H[x].size(); ++y) {
      if (H[x][y] < 0 || H[x][y] > c) return false;
      if (x > 0 && H[x][y] > H[x - 1][y]) return false;
      if (y > 0 && H[x][y] > H[x][y - 1]) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Asymptotic statistics

// Inner boundary at tau for a = b = lambda c in ON coordinates.
inline double arctic_curve(double lambda, double tau) {
  require(lambda > 0, "domain", "lambda must be positive");
  double r = 0.25 - tau * tau / (3 * lambda * lambda);
  require(r >= 0, "domain", "tau lies outside the inscribed ellipse");
  return std::sqrt(2 * lambda + 1) * std::sqrt(r);
}

inline double column_tau(const HexagonSpec& h, int m) {
  return std::sqrt(3.0) / 2 * (double(m) - h.a) / h.c;
}

// Upper boundary of the disordered region on column m, rescaled: the top
// run of equal sites is frozen and the boundary is the highest site of the
// other kind. Returns y in the centered ON frame, needs a = b.
inline double upper_boundary_point(const HexagonSpec& h, int m, const std::vector<int>& holes) {
  require(h.a == h.b, "domain", "the boundary statistic is defined for a = b");
  const auto cb = h.column(m);
  std::vector<char> is_hole(static_cast<std::size_t>(cb.gamma + 1), 0);
  for (int x : holes) is_hole[x] = 1;
  const char top = is_hole[cb.gamma];
  int z = cb.gamma;
  while (z >= 0 && is_hole[z] == top) --z;
  if (z < 0) z = cb.gamma;
  return (double(cb.alpha) / 2 + z - h.c / 2.0) / h.c;
}

// Limit density of the rescaled corner holes is Delta(x)^2 prod exp(-k x_j^2).
// The Stirling expansion of the Hahn weight at the center gives
// k = 4 lambda / (2 lambda + 1); the printed constant is 2 lambda / (lambda + 1).
inline double corner_gue_exponent(double lambda) { return 4 * lambda / (2 * lambda + 1); }
inline double corner_gue_exponent_printed(double lambda) { return 2 * lambda / (lambda + 1); }

// Rescaled hole tuples (xi_j - gamma_m/2)/sqrt(c) at column m, a = b.
inline std::vector<std::vector<double>> corner_gue_statistics(const HexagonSpec& h, int m,
                                                              int replicas, Rng& rng) {
  require(h.a == h.b, "domain", "corner statistics need a = b");
  require(m >= 1 && m <= h.b, "domain", "corner statistics need 1 <= m <= b");
  require(replicas >= 0, "domain", "replica count must be nonnegative");
  ColumnSampler sampler(h, m);
  const double g = sampler.ensemble().N, sc = std::sqrt(double(h.c));
  std::vector<std::vector<double>> out;
  for (int r = 0; r < replicas; ++r) {
    auto xi = sampler.sample_holes(rng);
    std::vector<double> v;
    for (int x : xi) v.push_back((x - g / 2) / sc);
    out.push_back(v);
  }
  return out;
}

}  // namespace tilings

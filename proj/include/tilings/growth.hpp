#pragma once

// Last-passage percolation with geometric weights, the corner growth model,
// the north polar partition of a tiling, and the Poissonized longest
// increasing subsequence with its discrete Bessel kernel.

#include "tilings/lattice.hpp"
#include "tilings/linalg.hpp"
#include "tilings/ope.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace tilings {

struct WeightMatrix {
  int M = 0, N = 0;
  std::vector<std::int64_t> w;  // row-major, w(i,j) at (i-1)*N + (j-1)

  WeightMatrix() = default;
  WeightMatrix(int m, int n) : M(m), N(n), w(static_cast<std::size_t>(m) * n, 0) {
    require(m >= 0 && n >= 0, "domain", "weight matrix dimensions must be nonnegative");
  }
  std::int64_t& operator()(int i, int j) { return w[static_cast<std::size_t>(i - 1) * N + (j - 1)]; }
  std::int64_t operator()(int i, int j) const {
    return w[static_cast<std::size_t>(i - 1) * N + (j - 1)];
  }
};

// Geometric variate P[k] = (1-q) q^k by inversion.
inline std::int64_t sample_geometric(double q, Rng& rng) {
  if (q <= 0) return 0;
  double u = 1.0 - uniform01(rng);  // (0, 1]
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log(q)));
}

inline WeightMatrix sample_weights(int M, int N, double q, Rng& rng) {
  require(q >= 0 && q < 1, "domain", "geometric parameter q must lie in [0,1)");
  WeightMatrix W(M, N);
  for (auto& x : W.w) x = sample_geometric(q, rng);
  return W;
}

// G(i,j) for all 1 <= i <= M, 1 <= j <= N, same indexing as the weights.
inline WeightMatrix lpp_value(const WeightMatrix& W) {
  WeightMatrix G(W.M, W.N);
  constexpr auto cap = std::numeric_limits<std::int64_t>::max();
  for (int i = 1; i <= W.M; ++i) {
    for (int j = 1; j <= W.N; ++j) {
      require(W(i, j) >= 0, "validation", "weights must be nonnegative");
      std::int64_t best = 0;
      if (i > 1) best = G(i - 1, j);
      if (j > 1) best = std::max(best, G(i, j - 1));
      require(best <= cap - W(i, j), "internal", "last-passage value overflows 64 bits");
      G(i, j) = best + W(i, j);
    }
  }
  return G;
}

// P[G(M,N) <= t] as a Krawtchouk max-particle probability with M particles
// on {0..t+N+M-1} and parameter q.
inline double lpp_cdf_exact(int M, int N, double q, long t) {
  require(M >= 1 && N >= 1, "domain", "M and N must be positive");
  require(q > 0 && q < 1, "domain", "q must lie in (0,1)");
  if (t < 0) return 0.0;
  if (M > N) std::swap(M, N);
  const int K = static_cast<int>(t) + N + M - 1;
  auto sys = build_orthonormal(DiscreteWeight::krawtchouk(K, q), M);
  return max_particle_cdf(ProjectionKernel(sys), static_cast<int>(t) + M - 1);
}

// Same identity in exact arithmetic by summing ensemble masses; small cases.
inline Rational lpp_cdf_exact_rational(int M, int N, const Rational& q, int t) {
  require(M >= 1 && N >= 1 && t >= 0, "domain", "need M, N >= 1 and t >= 0");
  if (M > N) std::swap(M, N);
  const int K = t + N + M - 1, top = t + M - 1;
  Rational total = 0;
  std::vector<int> h;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(h.size()) == M) {
      total += krawtchouk_ensemble_mass(h, K, q);
      return;
    }
    for (int x = start; x <= top; ++x) {
      h.push_back(x);
      self(self, x + 1);
      h.pop_back();
    }
  };
  rec(rec, 0);
  return total;
}

// Down-closed set given by its row lengths: (i,j) belongs iff j <= rows[i-1].
struct GrowthSet {
  std::vector<int> rows;

  int row(int i) const { return i >= 1 && i <= static_cast<int>(rows.size()) ? rows[i - 1] : 0; }
  bool contains(int i, int j) const { return j >= 1 && j <= row(i); }
  std::size_t size() const {
    std::size_t s = 0;
    for (int r : rows) s += static_cast<std::size_t>(r);
    return s;
  }
  void trim() {
    while (!rows.empty() && rows.back() == 0) rows.pop_back();
  }
  bool down_closed() const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i] < 0 || (i > 0 && rows[i] > rows[i - 1])) return false;
    return true;
  }
  bool operator==(const GrowthSet&) const = default;
  auto operator<=>(const GrowthSet&) const = default;
};

// Adds each outer corner independently with probability p.
inline GrowthSet corner_growth_step(const GrowthSet& omega, double p, Rng& rng) {
  require(p >= 0 && p <= 1, "domain", "p must lie in [0,1]");
  require(omega.down_closed(), "validation", "growth set is not down-closed");
  GrowthSet next = omega;
  next.rows.push_back(0);
  for (int i = 1; i <= static_cast<int>(next.rows.size()); ++i) {
    bool corner = i == 1 || omega.row(i - 1) > omega.row(i);
    if (corner && uniform01(rng) < p) next.rows[i - 1] += 1;
  }
  next.trim();
  return next;
}

// Omega(n) = {(i,j) : G(i,j) + i + j - 1 <= n}; needs M, N >= n.
inline GrowthSet omega_from_lpp(const WeightMatrix& G, int n) {
  require(G.M >= n && G.N >= n, "domain", "weight matrix too small for Omega(n)");
  GrowthSet s;
  for (int i = 1; i <= n; ++i) {
    int len = 0;
    while (len < n && G(i, len + 1) + i + len <= n) ++len;
    s.rows.push_back(len);
  }
  s.trim();
  return s;
}

// Partition of the north polar zone read off the level-1 type-I path:
// n - lambda_l = max { j : (l, j) on the path }, 1 <= l <= n+1.
inline std::vector<int> aztec_partition(const Tiling& t) {
  const int n = t.order;
  auto fam = extract_dr_paths(t, PathFlavor::type_I);
  std::vector<int> lambda(static_cast<std::size_t>(n + 1), 0);
  if (n == 0) return lambda;
  std::vector<int> top(static_cast<std::size_t>(n + 2), -1);
  for (const auto& v : fam.paths[0])
    if (v.x >= 1 && v.x <= n + 1) top[v.x] = std::max(top[v.x], v.y);
  for (int l = 1; l <= n + 1; ++l) {
    require(top[l] >= 0, "internal", "level-1 path misses a column");
    lambda[l - 1] = n - top[l];
  }
  return lambda;
}

// ---------------------------------------------------------------------------
// Poissonized longest increasing subsequence

inline int lis_length(const std::vector<int>& perm) {
  std::vector<int> piles;
  for (int x : perm) {
    auto it = std::lower_bound(piles.begin(), piles.end(), x);
    if (it == piles.end())
      piles.push_back(x);
    else
      *it = x;
  }
  return static_cast<int>(piles.size());
}

inline int lis_sample(double alpha, Rng& rng) {
  require(alpha > 0, "domain", "alpha must be positive");
  std::poisson_distribution<int> pois(alpha);
  int n = pois(rng);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return lis_length(perm);
}

inline constexpr double kMaxBesselAlpha = 2500.0;

inline void require_bessel_alpha(double alpha) {
  require(alpha > 0, "domain", "alpha must be positive");
  require(alpha <= kMaxBesselAlpha, "domain",
          "alpha exceeds " + std::to_string(kMaxBesselAlpha) + "; Bessel evaluation not trusted");
}

inline int bessel_cutoff(double alpha) {
  return static_cast<int>(std::ceil(std::max(60.0, 8 * std::sqrt(alpha))));
}

// J_k(2 sqrt(alpha)) for k = 0..count-1.
inline std::vector<double> bessel_table(double alpha, int count) {
  const double z = 2 * std::sqrt(alpha);
  std::vector<double> j(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) j[k] = std::cyl_bessel_j(double(k), z);
  return j;
}

// B_alpha(x,y) = sqrt(alpha) (J_x J_{y+1} - J_{x+1} J_y) / (x - y); on the
// diagonal the equivalent series sum_{s>=1} J_{x+s}^2.
inline double bessel_kernel(double alpha, int x, int y) {
  require_bessel_alpha(alpha);
  require(x >= 0 && y >= 0, "domain", "Bessel kernel sites must be nonnegative");
  const int hi = std::max(x, y) + bessel_cutoff(alpha) + 2;
  auto J = bessel_table(alpha, hi + 1);
  if (x != y) return std::sqrt(alpha) * (J[x] * J[y + 1] - J[x + 1] * J[y]) / double(x - y);
  double s = 0;
  for (int k = x + 1; k <= hi; ++k) s += J[k] * J[k];
  return s;
}

// P[L(alpha) <= n] = det(I - B_alpha) on {n, n+1, ...}, truncated.
inline double lis_cdf(double alpha, int n) {
  require_bessel_alpha(alpha);
  require(n >= 0, "domain", "n must be nonnegative");
  const int size = bessel_cutoff(alpha);
  const int hi = n + size + bessel_cutoff(alpha) + 2;
  auto J = bessel_table(alpha, hi + 1);
  Eigen::MatrixXd B(size, size);
  for (int a = 0; a < size; ++a) {
    int x = n + a;
    double d = 0;
    for (int k = x + 1; k <= hi; ++k) d += J[k] * J[k];
    B(a, a) = d;
    for (int b = 0; b < a; ++b) {
      int y = n + b;
      B(a, b) = B(b, a) = std::sqrt(alpha) * (J[x] * J[y + 1] - J[x + 1] * J[y]) / double(x - y);
    }
  }
  return gap_determinant(B);
}

}  // namespace tilings

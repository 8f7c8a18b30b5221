#pragma once

// Dimers on the cylindrical brick lattice G_{M,N}: the path description,
// the spectral kernel and partition function, free energies, and a
// backtracking enumerator used as an oracle.
//
// Two spectra are available. `printed` uses phi(s,t) with cos(pi s t / N)
// and w_j = cos(pi j / 2N)^{2M}, j = 0..N. `absorbing` uses the
// eigenvectors of the walk killed outside {0..2N}, restricted to even sites:
// phi(x,j) = sqrt(2/(N+1)) sin(pi j (2x+1) / (2N+2)) (half weight at
// j = N+1) and w_j = cos(pi j / (2N+2))^{2M}, j = 1..N+1. Only the second agrees with the
// enumeration; see the tests.

#include "tilings/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

namespace tilings {

enum class DimerSpectrum { printed, absorbing };

inline DimerSpectrum parse_spectrum(const std::string& s) {
  if (s == "printed") return DimerSpectrum::printed;
  if (s == "absorbing") return DimerSpectrum::absorbing;
  throw Error("domain", "unknown spectrum '" + s + "' (expected printed or absorbing)");
}

struct BrickSpec {
  int M = 1, N = 1;
  double z = 1, w = 1;
  DimerSpectrum spectrum = DimerSpectrum::printed;

  BrickSpec() = default;
  BrickSpec(int M_, int N_, double z_, double w_, DimerSpectrum s = DimerSpectrum::printed)
      : M(M_), N(N_), z(z_), w(w_), spectrum(s) {
    require(M >= 1 && N >= 1, "domain", "M and N must be positive");
    require(z > 0 && w > 0, "domain", "dimer weights z and w must be positive");
  }
  int vertices() const { return 2 * M * (2 * N + 1); }
};

// ---------------------------------------------------------------------------
// Spectral data

inline double phi(int N, int s, int t) {
  require(N >= 1, "domain", "N must be positive");
  require(s >= 0 && s <= N && t >= 0 && t <= N, "domain", "phi index outside 0..N");
  auto c = [&](int m) { return (m == 0 || m == 2 * N) ? 0.5 : 1.0; };
  return std::sqrt(2 * c(2 * s) * c(2 * t) / N) *
         std::cos(std::numbers::pi * double(s) * t / N);
}

inline double phi_absorbing(int N, int x, int j) {
  require(x >= 0 && x <= N && j >= 1 && j <= N + 1, "domain", "absorbing phi index out of range");
  const double norm = j == N + 1 ? std::sqrt(1.0 / (N + 1)) : std::sqrt(2.0 / (N + 1));
  return norm * std::sin(std::numbers::pi * j * (2.0 * x + 1) / (2.0 * N + 2));
}

struct DimerMode {
  double log_w;  // log of w_j = cos(theta_j)^{2M}; -inf when cos vanishes
  std::vector<double> phi;  // phi(x, j), x = 0..N
};

inline std::vector<DimerMode> dimer_modes(const BrickSpec& s) {
  std::vector<DimerMode> modes;
  const int N = s.N;
  auto log_cos_pow = [&](double theta) {
    double c = std::abs(std::cos(theta));
    return c < 1e-15 ? -std::numeric_limits<double>::infinity() : 2.0 * s.M * std::log(c);
  };
  if (s.spectrum == DimerSpectrum::printed) {
    for (int j = 0; j <= N; ++j) {
      DimerMode m{log_cos_pow(std::numbers::pi * j / (2.0 * N)), {}};
      for (int x = 0; x <= N; ++x) m.phi.push_back(phi(N, x, j));
      modes.push_back(std::move(m));
    }
  } else {
    for (int j = 1; j <= N + 1; ++j) {
      DimerMode m{log_cos_pow(std::numbers::pi * j / (2.0 * N + 2)), {}};
      for (int x = 0; x <= N; ++x) m.phi.push_back(phi_absorbing(N, x, j));
      modes.push_back(std::move(m));
    }
  }
  return modes;
}

namespace detail {

// log((2w/z)^{2M} w_j).
inline double log_activation(const BrickSpec& s, double log_w) {
  return 2.0 * s.M * std::log(2 * s.w / s.z) + log_w;
}

inline double logistic(double a) {
  if (std::isinf(a) && a < 0) return 0.0;
  return a >= 0 ? 1 / (1 + std::exp(-a)) : std::exp(a) / (1 + std::exp(a));
}

inline double log1p_exp(double a) {
  if (std::isinf(a) && a < 0) return 0.0;
  return a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

}  // namespace detail

// u_j = A w_j / (1 + A w_j), A = (2w/z)^{2M}.
inline std::vector<double> dimer_activations(const BrickSpec& s) {
  std::vector<double> u;
  for (const auto& m : dimer_modes(s)) u.push_back(detail::logistic(detail::log_activation(s, m.log_w)));
  return u;
}

inline Eigen::MatrixXd dimer_kernel(const BrickSpec& s) {
  const int n = s.N + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : dimer_modes(s)) {
    double u = detail::logistic(detail::log_activation(s, m.log_w));
    if (u == 0) continue;
    Eigen::Map<const Eigen::VectorXd> v(m.phi.data(), n);
    K.noalias() += u * v * v.transpose();
  }
  return K;
}

inline double dimer_correlation(const BrickSpec& s, const std::vector<int>& points) {
  std::set<int> uniq(points.begin(), points.end());
  require(uniq.size() == points.size(), "domain", "correlation points must be distinct");
  for (int x : points) require(x >= 0 && x <= s.N, "domain", "point outside 0..N");
  if (points.empty()) return 1.0;
  Eigen::MatrixXd K = dimer_kernel(s);
  Eigen::MatrixXd sub(points.size(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) sub(i, j) = K(points[i], points[j]);
  return dense_det(sub);
}

inline double log_partition_function(const BrickSpec& s) {
  double acc = s.M * (2.0 * s.N + 1) * std::log(s.z);
  for (const auto& m : dimer_modes(s)) acc += detail::log1p_exp(detail::log_activation(s, m.log_w));
  return acc;
}

inline double partition_function(const BrickSpec& s) { return std::exp(log_partition_function(s)); }

inline double free_energy(const BrickSpec& s) { return log_partition_function(s) / s.vertices(); }

// Limit as N then M grow. `printed` keeps the 1/(2 pi) prefactor of the
// integral term; `absorbing` uses 1/pi, the Riemann-sum limit of the
// finite-size formula.
inline double free_energy_limit(double z, double w, DimerSpectrum spectrum = DimerSpectrum::printed) {
  require(z > 0 && w > 0, "domain", "dimer weights must be positive");
  const double r = w / z;
  require(std::abs(r - 0.5) > 1e-12, "domain", "w/z = 1/2 is the critical point");
  const double base = 0.5 * std::log(z);
  if (r < 0.5) return base;
  const double upper = std::acos(z / (2 * w));
  auto f = [&](double t) { return std::log(2 * r * std::cos(t)); };
  double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 15, 1e-13);
  const double pre = spectrum == DimerSpectrum::printed ? 1 / (2 * std::numbers::pi) : 1 / std::numbers::pi;
  return base + pre * integral;
}

inline double theta0(double z, double w) {
  require(w / z > 0.5, "domain", "theta0 needs w/z > 1/2");
  return 2 / std::numbers::pi * std::acos(z / (2 * w));
}

inline double bulk_sine_kernel(double theta, int d) {
  if (d == 0) return theta;
  return std::sin(std::numbers::pi * d * theta) / (std::numbers::pi * d);
}

// Transition matrix of the walk on {0..2N} killed at -1 and 2N+1.
inline Eigen::MatrixXd absorbing_walk_matrix(int N) {
  require(N >= 1 && N <= 64, "domain", "transition-matrix oracle is limited to N <= 64");
  const int n = 2 * N + 1;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) P(i, i - 1) = 0.5;
    if (i + 1 < n) P(i, i + 1) = 0.5;
  }
  return P;
}

// ---------------------------------------------------------------------------
// Graph, covers and paths

struct BrickEdge {
  int u, v;  // vertex ids, u < v
  bool vertical;
};

// Vertex v_{j,k} has id j (2N+1) + k, 0 <= j < 2M, 0 <= k <= 2N.
class BrickGraph {
 public:
  BrickGraph(int M, int N) : M_(M), N_(N) {
    require(M >= 1 && N >= 1, "domain", "M and N must be positive");
    const int cols = 2 * M, H = 2 * N + 1;
    adj_.resize(static_cast<std::size_t>(cols * H));
    auto add = [&](int a, int b, bool vert) {
      BrickEdge e{std::min(a, b), std::max(a, b), vert};
      int id = static_cast<int>(edges_.size());
      edges_.push_back(e);
      adj_[a].push_back(id);
      adj_[b].push_back(id);
    };
    for (int j = 0; j < cols; ++j)
      for (int k = 0; k + 1 < H; ++k) add(id(j, k), id(j, k + 1), true);
    for (int j = 0; j < M; ++j)
      for (int k = 0; k < H; ++k) {
        if (k % 2 == 0)
          add(id(2 * j, k), id(2 * j + 1, k), false);
        else
          add(id(2 * j + 1, k), id((2 * j + 2) % cols, k), false);
      }
  }
  int id(int j, int k) const { return j * (2 * N_ + 1) + k; }
  int column(int v) const { return v / (2 * N_ + 1); }
  int height(int v) const { return v % (2 * N_ + 1); }
  int vertex_count() const { return static_cast<int>(adj_.size()); }
  const std::vector<BrickEdge>& edges() const { return edges_; }
  const std::vector<int>& incident(int v) const { return adj_[v]; }
  int M() const { return M_; }
  int N() const { return N_; }

  // Index of the edge {a, b}, or -1.
  int find_edge(int a, int b) const {
    for (int e : adj_[a])
      if ((edges_[e].u == a && edges_[e].v == b) || (edges_[e].u == b && edges_[e].v == a)) return e;
    return -1;
  }

 private:
  int M_, N_;
  std::vector<BrickEdge> edges_;
  std::vector<std::vector<int>> adj_;
};

struct DimerCover {
  std::vector<int> edges;  // sorted edge ids
  int horizontal = 0, vertical = 0;
  bool operator==(const DimerCover&) const = default;
};

// L periodic walks; heights[l][t], t = 0..2M (heights[l][2M] == heights[l][0]).
struct CylindricPathFamily {
  int M = 0, N = 0;
  std::vector<std::vector<int>> heights;
  bool operator==(const CylindricPathFamily&) const = default;
};

inline constexpr int kMaxEnumeratedVertices = 24;

inline std::vector<DimerCover> enumerate_dimers(int M, int N) {
  const int V = 2 * M * (2 * N + 1);
  require(V <= kMaxEnumeratedVertices, "refused",
          "G_{M,N} has " + std::to_string(V) + " vertices; enumeration is limited to " +
              std::to_string(kMaxEnumeratedVertices));
  BrickGraph g(M, N);
  std::vector<char> used(static_cast<std::size_t>(V), 0);
  std::vector<int> chosen;
  std::vector<DimerCover> out;
  auto rec = [&](auto&& self) -> void {
    int v = 0;
    while (v < V && used[v]) ++v;
    if (v == V) {
      DimerCover c;
      c.edges = chosen;
      std::sort(c.edges.begin(), c.edges.end());
      for (int e : c.edges) (g.edges()[e].vertical ? c.vertical : c.horizontal)++;
      out.push_back(c);
      return;
    }
    for (int e : g.incident(v)) {
      const auto& ed = g.edges()[e];
      int other = ed.u == v ? ed.v : ed.u;
      if (used[other]) continue;
      used[v] = used[other] = 1;
      chosen.push_back(e);
      self(self);
      chosen.pop_back();
      used[v] = used[other] = 0;
    }
  };
  rec(rec);
  return out;
}

// A path at height y at time t crosses the vertical edge in column t+1 (mod 2M).
inline CylindricPathFamily cover_to_paths(const BrickGraph& g, const DimerCover& c) {
  const int M = g.M(), N = g.N(), cols = 2 * M;
  std::vector<int> partner(static_cast<std::size_t>(g.vertex_count()), -1);
  for (int e : c.edges) {
    const auto& ed = g.edges()[e];
    if (!ed.vertical) continue;
    partner[ed.u] = ed.v;
    partner[ed.v] = ed.u;
  }
  CylindricPathFamily f{M, N, {}};
  for (int y0 = 0; y0 <= 2 * N; y0 += 2) {
    if (partner[g.id(1 % cols, y0)] < 0) continue;
    std::vector<int> h{y0};
    for (int t = 0; t < cols; ++t) {
      int v = g.id((t + 1) % cols, h.back());
      require(partner[v] >= 0, "validation", "cover does not define a continuous path");
      h.push_back(g.height(partner[v]));
    }
    require(h.back() == y0, "validation", "path is not periodic");
    f.heights.push_back(h);
  }
  return f;
}

inline DimerCover paths_to_cover(const BrickGraph& g, const CylindricPathFamily& f) {
  const int cols = 2 * g.M();
  std::vector<char> used(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<int> edges;
  for (const auto& h : f.heights) {
    require(static_cast<int>(h.size()) == cols + 1 && h.front() == h.back(), "validation",
            "path must have 2M steps and be periodic");
    for (int t = 0; t < cols; ++t) {
      require(std::abs(h[t + 1] - h[t]) == 1, "validation", "path step is not +-1");
      require(std::min(h[t], h[t + 1]) >= 0 && std::max(h[t], h[t + 1]) <= 2 * g.N(), "validation",
              "path leaves 0..2N");
      int a = g.id((t + 1) % cols, h[t]), b = g.id((t + 1) % cols, h[t + 1]);
      require(!used[a] && !used[b], "validation", "paths intersect");
      used[a] = used[b] = 1;
      edges.push_back(g.find_edge(a, b));
    }
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (used[v]) continue;
    int e = -1;
    for (int id : g.incident(v))
      if (!g.edges()[id].vertical) e = id;
    require(e >= 0, "validation", "uncovered vertex has no horizontal edge");
    const auto& ed = g.edges()[e];
    int other = ed.u == v ? ed.v : ed.u;
    require(!used[other], "validation", "horizontal partner already covered");
    used[v] = used[other] = 1;
    edges.push_back(e);
  }
  DimerCover c;
  c.edges = edges;
  std::sort(c.edges.begin(), c.edges.end());
  for (int e : c.edges) (g.edges()[e].vertical ? c.vertical : c.horizontal)++;
  return c;
}

// g_{M,N}(h, v): number of covers with h horizontal and v vertical dimers.
inline std::map<std::pair<int, int>, long> dimer_polynomial(int M, int N) {
  std::map<std::pair<int, int>, long> out;
  for (const auto& c : enumerate_dimers(M, N)) out[{c.horizontal, c.vertical}]++;
  return out;
}

inline double enumerated_partition_function(int M, int N, double z, double w) {
  double s = 0;
  for (auto [hv, n] : dimer_polynomial(M, N)) s += n * std::pow(z, hv.first) * std::pow(w, hv.second);
  return s;
}

// P[paths start at every 2 x_i] from the enumeration.
inline double enumerated_correlation(int M, int N, double z, double w, const std::vector<int>& points) {
  BrickGraph g(M, N);
  double num = 0, den = 0;
  for (const auto& c : enumerate_dimers(M, N)) {
    double wt = std::pow(z, c.horizontal) * std::pow(w, c.vertical);
    den += wt;
    auto f = cover_to_paths(g, c);
    std::set<int> starts;
    for (const auto& h : f.heights) starts.insert(h[0] / 2);
    bool all = std::all_of(points.begin(), points.end(), [&](int x) { return starts.count(x) > 0; });
    if (all) num += wt;
  }
  return num / den;
}

}  // namespace tilings

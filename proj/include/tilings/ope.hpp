#pragma once

// Discrete orthogonal polynomial ensembles: Krawtchouk, Hahn and associated
// Hahn weights, orthonormal function tables, projection kernels and exact
// determinantal sampling.

#include "tilings/common.hpp"
#include "tilings/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace tilings {

enum class WeightFamily { krawtchouk, hahn, associated_hahn };

struct DiscreteWeight {
  WeightFamily family = WeightFamily::krawtchouk;
  int size = 1;  // support is {0, ..., size}
  double p = 0.5;
  double alpha = 0.0, beta = 0.0;

  static DiscreteWeight krawtchouk(int K, double p) {
    require(K >= 1, "domain", "Krawtchouk window K must be >= 1");
    require(p > 0 && p < 1, "domain", "Krawtchouk p must lie in (0,1)");
    return {WeightFamily::krawtchouk, K, p, 0, 0};
  }
  static DiscreteWeight hahn(int N, double alpha, double beta) {
    require(N >= 0, "domain", "Hahn N must be >= 0");
    require(alpha > -1 && beta > -1, "domain", "Hahn parameters must exceed -1");
    return {WeightFamily::hahn, N, 0.5, alpha, beta};
  }
  static DiscreteWeight associated_hahn(int N, double alpha, double beta) {
    require(N >= 0, "domain", "associated Hahn N must be >= 0");
    require(alpha > -1 && beta > -1, "domain", "Hahn parameters must exceed -1");
    return {WeightFamily::associated_hahn, N, 0.5, alpha, beta};
  }

  int support_size() const { return size + 1; }

  double log_weight(int x) const {
    require(x >= 0 && x <= size, "domain", "site outside the support");
    const double n = size;
    switch (family) {
      case WeightFamily::krawtchouk:
        return std::lgamma(n + 1) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1) +
               x * std::log(p) + (n - x) * std::log1p(-p);
      case WeightFamily::hahn:
        return std::lgamma(n + alpha - x + 1) + std::lgamma(beta + x + 1) -
               std::lgamma(x + 1.0) - std::lgamma(n - x + 1);
      case WeightFamily::associated_hahn:
        return -(std::lgamma(x + 1.0) + std::lgamma(n - x + 1) +
                 std::lgamma(n + alpha - x + 1) + std::lgamma(beta + x + 1));
    }
    return 0;
  }
};

// Exact weights for rational p and integer Hahn parameters.
inline Rational krawtchouk_weight_exact(int K, const Rational& p, int x) {
  return Rational(binomial(K, x)) * rational_pow(p, x) * rational_pow(1 - p, K - x);
}
inline Rational hahn_weight_exact(int N, int alpha, int beta, int x) {
  return Rational(factorial(N + alpha - x) * factorial(beta + x), factorial(x) * factorial(N - x));
}
inline Rational associated_hahn_weight_exact(int N, int alpha, int beta, int x) {
  return Rational(BigInt(1), factorial(x) * factorial(N - x) * factorial(N + alpha - x) *
                                 factorial(beta + x));
}

// Ensemble mass Delta(h)^2 prod w(h_j) / Z for sorted h, with Z summed over
// sorted configurations.
inline Rational vandermonde_squared(const std::vector<int>& h) {
  Rational v = 1;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) v *= (h[j] - h[i]) * (h[j] - h[i]);
  return v;
}

// Normalization of the Krawtchouk ensemble over ordered N-tuples.
inline Rational krawtchouk_partition_exact(int N, int K, const Rational& p) {
  Rational z = Rational(factorial(N));
  for (int j = 0; j < N; ++j) z *= Rational(factorial(j), factorial(K - j));
  z *= rational_pow(Rational(factorial(K)), N) * rational_pow(p * (1 - p), N * (N - 1) / 2);
  return z;
}

// Hahn ensemble normalization over ordered m-tuples (integer parameters).
inline Rational hahn_partition_exact(int N, int m, int alpha, int beta) {
  Rational z = Rational(factorial(m));
  for (int j = 0; j < m; ++j) {
    BigInt num = factorial(j) * factorial(alpha + j) * factorial(beta + j) *
                 factorial(alpha + beta + j + N + 1) * factorial(alpha + beta + j);
    BigInt den = factorial(alpha + beta + 2 * j) * factorial(alpha + beta + 2 * j + 1) *
                 factorial(N - j);
    z *= Rational(num, den);
  }
  return z;
}

// Probability of the unordered configuration h (sorted, distinct) in the
// Krawtchouk ensemble with N = h.size() particles on {0..K}.
inline Rational krawtchouk_ensemble_mass(const std::vector<int>& h, int K, const Rational& p) {
  const int N = static_cast<int>(h.size());
  Rational m = vandermonde_squared(h);
  for (int x : h) m *= krawtchouk_weight_exact(K, p, x);
  return m * Rational(factorial(N)) / krawtchouk_partition_exact(N, K, p);
}

// ---------------------------------------------------------------------------
// Jacobi matrices: x psi_n = a_{n+1} psi_{n+1} + b_n psi_n + a_n psi_{n-1}.

struct JacobiMatrix {
  std::vector<double> b;  // b[0..d-1]
  std::vector<double> a;  // a[0] = 0, a[n] couples n-1 and n
  int dimension() const { return static_cast<int>(b.size()); }
};

inline JacobiMatrix krawtchouk_jacobi(int K, double p) {
  const double q = 1 - p;
  JacobiMatrix j;
  j.b.resize(K + 1);
  j.a.assign(K + 1, 0.0);
  for (int n = 0; n <= K; ++n) {
    j.b[n] = p * (K - n) + q * n;
    if (n > 0) j.a[n] = std::sqrt(double(n) * (K - n + 1) * p * q);
  }
  return j;
}

// Hahn recurrence coefficients exactly as printed (b in units of x/N).
inline double hahn_a_printed(int n, int N, double al, double be) {
  const double s = 2.0 * n + al + be;
  double pre = n * (n + al) * (n + al + be + N + 1) / (s * (s + 1));
  double rad = (N - n + 1) * (s + 1) * (be + n) * (al + be + n) /
               ((al + n) * (n + N + al + be + 1) * n * (s + 1));
  return pre * std::sqrt(rad);
}
inline double hahn_b_printed(int n, int N, double al, double be) {
  const double s = 2.0 * n + al + be;
  double b = (n + al + be + 1) * (n + be + 1) * (N - n) / (N * (s + 1) * (s + 2));
  if (n > 0) b += n * (n + al) * (n + al + be + N + 1) / (N * s * (s + 1));
  return b;
}

// Hahn recurrence from the monic three-term relation for the weight
// (N+alpha-t)!(beta+t)!/(t!(N-t)!).
inline JacobiMatrix hahn_jacobi(int N, double al, double be) {
  JacobiMatrix j;
  j.b.resize(N + 1);
  j.a.assign(N + 1, 0.0);
  auto A = [&](int n) {
    return (n + al + be + 1) * (n + be + 1) * (N - n) /
           ((2 * n + al + be + 1) * (2 * n + al + be + 2));
  };
  auto C = [&](int n) {
    if (n == 0) return 0.0;
    return n * (n + al + be + N + 1) * (n + al) / ((2 * n + al + be) * (2 * n + al + be + 1));
  };
  for (int n = 0; n <= N; ++n) {
    j.b[n] = A(n) + C(n);
    if (n > 0) j.a[n] = std::sqrt(A(n - 1) * C(n));
  }
  return j;
}

// Stieltjes procedure by modified Gram-Schmidt with full
// reorthogonalization; returns the Jacobi coefficients and the orthonormal
// function table psi(n, x) = p_n(x) sqrt(w(x)) for n < steps.
struct LanczosResult {
  JacobiMatrix jacobi;
  Eigen::MatrixXd psi;  // steps x support
};

inline LanczosResult lanczos(const std::vector<double>& log_w, int steps) {
  const int S = static_cast<int>(log_w.size());
  require(steps >= 1 && steps <= S, "domain", "Lanczos steps exceed the support size");
  double top = *std::max_element(log_w.begin(), log_w.end());
  Eigen::VectorXd v0(S);
  for (int x = 0; x < S; ++x) v0(x) = std::exp(0.5 * (log_w[x] - top));
  v0.normalize();
  LanczosResult r;
  r.psi.resize(steps, S);
  r.jacobi.b.assign(steps, 0.0);
  r.jacobi.a.assign(steps + 1, 0.0);
  r.psi.row(0) = v0.transpose();
  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(S, 0, S - 1);
  for (int n = 0; n < steps; ++n) {
    Eigen::VectorXd u = r.psi.row(n).transpose().cwiseProduct(xs);
    r.jacobi.b[n] = r.psi.row(n).dot(u);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd c = r.psi.topRows(n + 1) * u;
      u -= r.psi.topRows(n + 1).transpose() * c;
    }
    double nrm = u.norm();
    r.jacobi.a[n + 1] = nrm;
    if (n + 1 < steps) {
      require(nrm > 1e-300, "numerical", "Lanczos breakdown at degree " + std::to_string(n + 1));
      r.psi.row(n + 1) = (u / nrm).transpose();
    }
  }
  return r;
}

namespace detail {

// Normalized eigenvector of the Jacobi matrix for the eigenvalue lambda,
// by a twisted factorization: forward pivots from the top, backward pivots
// from the bottom, joined at the index where the eigenvector is largest.
// Sign fixed so that component 0 is positive.
inline void jacobi_eigenvector(const JacobiMatrix& J, double lambda, std::vector<double>& v,
                               std::vector<double>& fwd, std::vector<double>& bwd) {
  const int d = J.dimension();
  constexpr double tiny = 1e-280;
  auto guard = [](double x) { return x == 0.0 ? tiny : x; };
  fwd.resize(d);
  bwd.resize(d);
  v.assign(d, 0.0);
  fwd[0] = guard(J.b[0] - lambda);
  for (int i = 1; i < d; ++i) fwd[i] = guard((J.b[i] - lambda) - J.a[i] * J.a[i] / fwd[i - 1]);
  bwd[d - 1] = guard(J.b[d - 1] - lambda);
  for (int i = d - 2; i >= 0; --i)
    bwd[i] = guard((J.b[i] - lambda) - J.a[i + 1] * J.a[i + 1] / bwd[i + 1]);
  int k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    double g = std::abs(fwd[i] + bwd[i] - (J.b[i] - lambda));
    if (g < best) {
      best = g;
      k = i;
    }
  }
  v[k] = 1.0;
  int sign0 = 1;
  for (int i = k - 1; i >= 0; --i) {
    double ratio = -J.a[i + 1] / fwd[i];
    v[i] = ratio * v[i + 1];
    if (ratio < 0) sign0 = -sign0;
  }
  for (int i = k + 1; i < d; ++i) v[i] = -J.a[i] / bwd[i] * v[i - 1];
  double nrm = 0;
  for (double x : v) nrm += x * x;
  double scale = (sign0 > 0 ? 1.0 : -1.0) / std::sqrt(nrm);
  for (double& x : v) x *= scale;
}

}  // namespace detail

// Orthonormal functions psi_n(x) = p_n(x) sqrt(w(x)) for n = 0..rows-1 on
// the whole support, from the full Jacobi matrix of a measure whose
// support points are 0..d-1.
inline Eigen::MatrixXd psi_from_jacobi(const JacobiMatrix& J, int rows) {
  const int d = J.dimension();
  Eigen::MatrixXd psi(rows, d);
  std::vector<double> v, f, b;
  for (int x = 0; x < d; ++x) {
    detail::jacobi_eigenvector(J, x, v, f, b);
    for (int n = 0; n < rows; ++n) psi(n, x) = v[n];
  }
  return psi;
}

struct OrthonormalSystem {
  DiscreteWeight weight;
  int N = 0;              // degrees 0..N-1 span the kernel
  JacobiMatrix jacobi;    // at least N+1 diagonal entries when N <= size
  Eigen::MatrixXd psi;    // rows 0..min(N, size), columns = support
  double log_mass = 0;    // log sum_x w(x)
  std::string diagnostic;

  int support_size() const { return weight.support_size(); }
  double log_kappa(int n) const {
    double lk = -0.5 * log_mass;
    for (int j = 1; j <= n; ++j) lk -= std::log(jacobi.a[j]);
    return lk;
  }
  // Orthonormal polynomial value p_n(x).
  double p(int n, int x) const { return psi(n, x) * std::exp(-0.5 * weight.log_weight(x)); }
};

inline double max_orthonormality_residual(const Eigen::MatrixXd& psi, int rows) {
  Eigen::MatrixXd g = psi.topRows(rows) * psi.topRows(rows).transpose();
  g -= Eigen::MatrixXd::Identity(rows, rows);
  return g.cwiseAbs().maxCoeff();
}

inline OrthonormalSystem build_orthonormal(const DiscreteWeight& weight, int N) {
  const int S = weight.support_size();
  require(N >= 1 && N <= S, "domain", "number of degrees must satisfy 1 <= N <= support size");
  OrthonormalSystem sys;
  sys.weight = weight;
  sys.N = N;
  std::vector<double> lw(S);
  for (int x = 0; x < S; ++x) lw[x] = weight.log_weight(x);
  double top = *std::max_element(lw.begin(), lw.end());
  double acc = 0;
  for (double l : lw) acc += std::exp(l - top);
  sys.log_mass = top + std::log(acc);
  const int rows = std::min(N + 1, S);
  if (weight.family == WeightFamily::krawtchouk) {
    sys.jacobi = krawtchouk_jacobi(weight.size, weight.p);
    sys.psi = psi_from_jacobi(sys.jacobi, rows);
  } else {
    LanczosResult lr = lanczos(lw, rows);
    sys.jacobi = lr.jacobi;
    sys.psi = std::move(lr.psi);
    if (weight.family == WeightFamily::hahn && weight.size >= 1) {
      double worst = 0;
      for (int n = 0; n + 1 < rows; ++n) {
        worst = std::max(worst, std::abs(weight.size * hahn_b_printed(n, weight.size,
                                                                      weight.alpha, weight.beta) -
                                         sys.jacobi.b[n]));
        if (n >= 1)
          worst = std::max(worst, std::abs(hahn_a_printed(n, weight.size, weight.alpha,
                                                          weight.beta) -
                                           sys.jacobi.a[n]));
      }
      if (worst > 1e-10)
        sys.diagnostic = "printed Hahn recurrence deviates from Gram-Schmidt by " +
                         std::to_string(worst) + "; using Gram-Schmidt coefficients";
    }
  }
  if (S <= 2001) {
    const int check = std::min(N, S);
    Eigen::MatrixXd g = sys.psi.topRows(check) * sys.psi.topRows(check).transpose();
    for (int n = 0; n < check; ++n) {
      for (int m = 0; m < check; ++m) {
        double e = std::abs(g(n, m) - (n == m ? 1.0 : 0.0));
        if (e > 1e-10)
          throw Error("numerical", "orthonormality residual " + std::to_string(e) +
                                       " at degree " + std::to_string(std::max(n, m)));
      }
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Projection kernels

class ProjectionKernel {
 public:
  ProjectionKernel() = default;
  explicit ProjectionKernel(const OrthonormalSystem& sys)
      : psi_(sys.psi.topRows(sys.N)), N_(sys.N) {
    if (sys.psi.rows() > sys.N) {
      psi_next_ = sys.psi.row(sys.N).transpose();
      a_N_ = sys.jacobi.a[sys.N];
    }
  }

  int support_size() const { return static_cast<int>(psi_.cols()); }
  int rank() const { return N_; }
  const Eigen::MatrixXd& psi() const { return psi_; }

  double operator()(int x, int y) const { return psi_.col(x).dot(psi_.col(y)); }

  // Christoffel-Darboux quotient, x != y.
  double christoffel_darboux(int x, int y) const {
    require(x != y, "domain", "Christoffel-Darboux form needs distinct sites");
    if (psi_next_.size() == 0) return 0.0;  // full rank: identity kernel
    const int n = N_ - 1;
    return a_N_ * (psi_next_(x) * psi_(n, y) - psi_(n, x) * psi_next_(y)) / double(x - y);
  }

  Eigen::VectorXd diagonal() const { return psi_.colwise().squaredNorm().transpose(); }

  Eigen::MatrixXd dense() const { return psi_.transpose() * psi_; }

  Eigen::MatrixXd restrict_to(const std::vector<int>& sites) const {
    Eigen::MatrixXd cols(N_, static_cast<Eigen::Index>(sites.size()));
    for (std::size_t i = 0; i < sites.size(); ++i) {
      require(sites[i] >= 0 && sites[i] < support_size(), "domain", "site outside the support");
      cols.col(static_cast<Eigen::Index>(i)) = psi_.col(sites[i]);
    }
    return cols.transpose() * cols;
  }

  Eigen::MatrixXd restrict_to_range(int lo, int hi) const {
    require(lo >= 0 && hi < support_size() && lo <= hi + 1, "domain", "bad site range");
    auto block = psi_.middleCols(lo, hi - lo + 1);
    return block.transpose() * block;
  }

 private:
  Eigen::MatrixXd psi_;
  Eigen::VectorXd psi_next_;
  double a_N_ = 0;
  int N_ = 0;
};

inline ProjectionKernel cd_kernel(const OrthonormalSystem& sys) { return ProjectionKernel(sys); }

inline double correlation(const ProjectionKernel& k, std::vector<int> points) {
  std::vector<int> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "domain",
          "correlation points must be distinct");
  if (points.empty()) return 1.0;
  return std::max(0.0, dense_det(k.restrict_to(points)));
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

constexpr double kPositivityTol = 1e-8;

// Chain-rule sampler: visits sites in the given order, includes each with
// its conditional probability, and updates the Schur complement. After each
// visit `stop(label, taken)` may end the scan.
template <class Stop>
std::vector<int> sequential_dpp(Eigen::MatrixXd a, const std::vector<int>& labels, Rng& rng, Stop&& stop) {
  const Eigen::Index n = a.rows();
  std::vector<int> out;
  for (Eigen::Index j = 0; j < n; ++j) {
    double p = a(j, j);
    if (p < -kPositivityTol || p > 1 + kPositivityTol)
      throw Error("numerical", "DPP conditional probability " + std::to_string(p) +
                                   " left [0,1]; kernel is ill-conditioned");
    p = std::clamp(p, 0.0, 1.0);
    bool take = uniform01(rng) < p;
    if (take) out.push_back(labels[static_cast<std::size_t>(j)]);
    if (stop(labels[static_cast<std::size_t>(j)], take)) return out;
    double pivot = take ? p : p - 1.0;
    if (j + 1 == n || pivot == 0.0) continue;
    const Eigen::Index m = n - j - 1;
    Eigen::VectorXd col = a.col(j).tail(m);
    a.bottomRightCorner(m, m).noalias() -= (col / pivot) * col.transpose();
  }
  return out;
}

// Stops after the first inclusion when first_only is set.
inline std::vector<int> sequential_dpp(Eigen::MatrixXd a, const std::vector<int>& labels,
                                       Rng& rng, bool first_only) {
  return sequential_dpp(std::move(a), labels, rng, [&](int, bool taken) { return first_only && taken; });
}

}  // namespace detail

// Exact sample from the DPP with symmetric kernel matrix `k` (0 <= k <= I).
inline std::vector<int> sample_dpp_matrix(const Eigen::MatrixXd& k, Rng& rng,
                                          const std::vector<int>& labels = {}) {
  std::vector<int> lab = labels;
  if (lab.empty()) {
    lab.resize(static_cast<std::size_t>(k.rows()));
    std::iota(lab.begin(), lab.end(), 0);
  }
  auto out = detail::sequential_dpp(k, lab, rng, false);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<int> sample_dpp(const ProjectionKernel& k, Rng& rng) {
  auto out = sample_dpp_matrix(k.dense(), rng);
  if (static_cast<int>(out.size()) != k.rank())
    throw Error("numerical", "projection DPP sample has the wrong cardinality");
  return out;
}

// Sampler for the largest particle of a projection DPP. Scans downward from
// the top of the support over windows of growing width; exact because the
// chain rule in descending order only needs the kernel on the visited sites.
class MaxParticleSampler {
 public:
  MaxParticleSampler(const ProjectionKernel& k, int window) : kernel_(&k) {
    const int S = k.support_size();
    window = std::min(window, S);
    lo_ = S - window;
    std::vector<int> sites;
    for (int x = S - 1; x >= lo_; --x) sites.push_back(x);
    labels_ = sites;
    block_ = k.restrict_to(sites);
  }

  int sample(Rng& rng) const {
    auto out = detail::sequential_dpp(block_, labels_, rng, true);
    if (!out.empty()) return out.front();
    require(lo_ > 0, "numerical", "projection DPP produced no particle");
    // The window held no particle: redraw full scans until the largest
    // particle falls below the window, i.e. sample conditioned on that event.
    std::vector<int> all;
    for (int x = kernel_->support_size() - 1; x >= 0; --x) all.push_back(x);
    Eigen::MatrixXd full = kernel_->restrict_to(all);
    for (;;) {
      auto f = detail::sequential_dpp(full, all, rng, true);
      require(!f.empty(), "numerical", "projection DPP produced no particle");
      if (f.front() < lo_) return f.front();
    }
  }

 private:
  const ProjectionKernel* kernel_;
  int lo_ = 0;
  std::vector<int> labels_;
  Eigen::MatrixXd block_;
};

// Sampler for the top edge of the disordered region: scanning down from the
// top site, the first site whose kind (particle or hole) differs from the
// top site. This is the largest particle when the top is empty and the
// largest hole when the top is packed.
class TopEdgeSampler {
 public:
  TopEdgeSampler(const ProjectionKernel& k, int window) : kernel_(&k) {
    const int S = k.support_size();
    window = std::min(window, S);
    for (int x = S - 1; x >= S - window; --x) labels_.push_back(x);
    block_ = k.restrict_to(labels_);
  }

  // Returns -1 when every site has the same kind.
  int sample(Rng& rng) const {
    int edge = scan(block_, labels_, rng);
    const int lo = kernel_->support_size() - static_cast<int>(labels_.size());
    if (edge >= 0 || lo == 0) return edge;
    // No change inside the window: redraw full scans until the edge falls
    // below it, which samples the law conditioned on that event.
    std::vector<int> all;
    for (int x = kernel_->support_size() - 1; x >= 0; --x) all.push_back(x);
    Eigen::MatrixXd full = kernel_->restrict_to(all);
    for (;;) {
      edge = scan(full, all, rng);
      if (edge < lo) return edge;
    }
  }

 private:
  static int scan(const Eigen::MatrixXd& block, const std::vector<int>& labels, Rng& rng) {
    int top_kind = -1, edge = -1;
    detail::sequential_dpp(block, labels, rng, [&](int label, bool taken) {
      if (top_kind < 0) {
        top_kind = taken;
        return false;
      }
      if (static_cast<int>(taken) == top_kind) return false;
      edge = label;
      return true;
    });
    return edge;
  }

  const ProjectionKernel* kernel_;
  std::vector<int> labels_;
  Eigen::MatrixXd block_;
};

// ---------------------------------------------------------------------------
// Statistics

// var nu(I) for I = {lo, ..., hi}.
inline double number_variance(const ProjectionKernel& k, int lo, int hi) {
  if (hi < lo) return 0.0;
  require(lo >= 0 && hi < k.support_size(), "domain", "interval outside the support");
  auto block = k.psi().middleCols(lo, hi - lo + 1);
  double trace = block.squaredNorm();
  double frob;
  if (block.cols() <= block.rows())
    frob = (block.transpose() * block).squaredNorm();
  else
    frob = (block * block.transpose()).squaredNorm();
  return std::max(0.0, trace - frob);
}

// Eigenvalues of the kernel restricted to I; nu(I) is a sum of independent
// Bernoulli variables with these parameters.
inline Eigen::VectorXd restricted_spectrum(const ProjectionKernel& k, int lo, int hi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.restrict_to_range(lo, hi),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
}

struct CountCumulants {
  double mean = 0, variance = 0, skewness = 0, excess_kurtosis = 0;
};

inline CountCumulants bernoulli_sum_cumulants(const Eigen::VectorXd& lambdas) {
  double k1 = 0, k2 = 0, k3 = 0, k4 = 0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    double p = lambdas(i), v = p * (1 - p);
    k1 += p;
    k2 += v;
    k3 += v * (1 - 2 * p);
    k4 += v * (1 - 6 * v);
  }
  CountCumulants c{k1, k2, 0, 0};
  if (k2 > 0) {
    c.skewness = k3 / std::pow(k2, 1.5);
    c.excess_kurtosis = k4 / (k2 * k2);
  }
  return c;
}

// P[max particle <= s] = det(I - K) on {s+1, ..., top}.
inline double max_particle_cdf(const ProjectionKernel& k, int s) {
  const int top = k.support_size() - 1;
  if (s >= top) return 1.0;
  require(s >= -1, "domain", "threshold below the support");
  return gap_determinant(k.restrict_to_range(s + 1, top));
}

// Mean particles per site in the Krawtchouk ensemble with p = 1/2 and
// N/K -> t.
inline double krawtchouk_density(double t, double xi) {
  require(t > 0 && t <= 0.5, "domain", "density needs 0 < t <= 1/2");
  double r2 = t * (1 - t) - (xi - 0.5) * (xi - 0.5);
  if (r2 <= 0) return 0.0;
  return std::atan(std::sqrt(r2) / std::sqrt(0.25 - t * (1 - t))) / std::numbers::pi;
}

struct EdgeConstants {
  double beta = 0;
  double rho = 0;
};

// Rescaled right edge of the Krawtchouk equilibrium support, N/K -> t.
inline double krawtchouk_edge(double t, double p) {
  require(t > 0 && t < 1, "domain", "edge needs 0 < t < 1");
  require(p > 0 && p < 1, "domain", "edge needs 0 < p < 1");
  const double q = 1 - p;
  return (1 - t) * p + t * q + 2 * std::sqrt(p * q * t * (1 - t));
}

inline EdgeConstants edge_constants(double t, double p) {
  require(t > 0 && t < 1, "domain", "edge constants need 0 < t < 1");
  require(p > 0 && p < 1, "domain", "edge constants need 0 < p < 1");
  const double q = 1 - p;
  require(p * t < q * (1 - t), "domain", "edge constants need pt < q(1-t)");
  EdgeConstants e;
  e.beta = krawtchouk_edge(t, p);
  e.rho = std::pow(p * q * t * (1 - t), 1.0 / 6.0) *
          std::pow(std::sqrt(q * (1 - t)) - std::sqrt(p * t), 2.0 / 3.0) *
          std::pow(std::sqrt(p * (1 - t)) + std::sqrt(q * t), 2.0 / 3.0);
  return e;
}

inline double discrete_sine_kernel(long u) {
  if (u == 0) return 0.5;
  return std::sin(std::numbers::pi * u / 2.0) / (std::numbers::pi * u);
}

// Right edge of the rescaled Hahn equilibrium support, by golden-section
// maximization of g on (0, t).
inline double hahn_edge(double t, double alpha0) {
  require(t > 0 && t < 1, "domain", "hahn_edge needs 0 < t < 1");
  require(alpha0 >= 0, "domain", "hahn_edge needs alpha0 >= 0");
  auto g = [&](double s) {
    return 0.5 + std::sqrt(s * (1 - s) * (s + 2 * alpha0) * (s + 2 * alpha0 + 1)) /
                     (2 * (s + alpha0));
  };
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double lo = 0, hi = t;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = g(x1);
    }
  }
  double best = std::max({g(0.5 * (lo + hi)), g(t)});
  return best / t;
}

inline double hahn_edge_hexagon(double lambda, double mu) {
  require(lambda > 0, "domain", "hahn_edge_hexagon needs lambda > 0");
  require(mu > 0 && mu <= lambda / (lambda + 1) + 1e-15, "domain",
          "hahn_edge_hexagon needs 0 < mu <= lambda/(lambda+1)");
  return (mu + 1) / (2 * mu) +
         std::sqrt((2 * lambda + 1) * mu * (2 * lambda - mu)) / (2 * lambda * mu);
}

// One-point marginal of the Hahn ensemble with n particles at site t.
inline double hahn_marginal(const DiscreteWeight& weight, int n, int t) {
  require(weight.family == WeightFamily::hahn, "domain", "hahn_marginal needs a Hahn weight");
  auto sys = build_orthonormal(weight, n);
  double s = 0;
  for (int k = 0; k < n; ++k) s += sys.psi(k, t) * sys.psi(k, t);
  return s / n;
}

// ---------------------------------------------------------------------------
// Validation paths

// p_n(x) by trapezoid quadrature of the contour integral on |z| = radius,
// with prefactor binom(K,n)^{-1/2} (pq)^{-n/2}.
inline double krawtchouk_p_contour(int K, double p, int n, int x, double radius,
                                   int nodes = 4096) {
  require(n >= 0 && n <= 50, "domain", "contour validation is limited to degree <= 50");
  const double q = 1 - p;
  require(radius > 0 && radius < std::min(1 / p, 1 / q), "domain", "contour radius too large");
  double acc = 0;
  for (int j = 0; j < nodes; ++j) {
    double th = 2 * std::numbers::pi * j / nodes;
    std::complex<double> z = std::polar(radius, th);
    std::complex<double> f = std::pow(1.0 + q * z, x) * std::pow(1.0 - p * z, K - x) *
                             std::pow(z, -n);
    acc += f.real();
  }
  acc /= nodes;
  double log_pre = -0.5 * (std::lgamma(K + 1.0) - std::lgamma(n + 1.0) - std::lgamma(K - n + 1.0)) -
                   0.5 * n * std::log(p * q);
  return acc * std::exp(log_pre);
}

// Hahn 3F2 sum F_n(x) = sum_k (-n)_k(-x)_k(n+a+b+1)_k / ((b+1)_k(-N)_k k!)
// and the squared norm d^2; exact for integer parameters.
inline Rational hahn_hypergeometric(int n, int N, int al, int be, int x) {
  Rational sum = 0, term = 1;
  for (int k = 0; k <= n; ++k) {
    sum += term;
    if (k == n) break;
    Rational num = Rational(-n + k) * Rational(-x + k) * Rational(n + al + be + 1 + k);
    Rational den = Rational(be + 1 + k) * Rational(-N + k) * Rational(k + 1);
    if (num == 0) break;
    term *= num / den;
  }
  return sum;
}

inline Rational rising(long a, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

inline Rational hahn_d_squared(int n, int N, int al, int be) {
  return Rational(al + be + 1) * rising(al + 1, n) * rising(N + al + be + 2, n) /
         (Rational(binomial(N, n)) * Rational(2 * n + al + be + 1) * rising(be + 1, n) *
          rising(al + be + 1, n));
}

// Normalized Hahn weight W(x) = binom(b+x,x) binom(a+N-x,N-x) / binom(a+b+N+1,N).
inline Rational hahn_probability_weight(int N, int al, int be, int x) {
  return Rational(binomial(be + x, x) * binomial(al + N - x, N - x),
                  binomial(al + be + N + 1, N));
}

}  // namespace tilings

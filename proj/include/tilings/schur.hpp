#pragma once

// Cascade of labelled growth models equivalent to RSK, its inverse, Schur
// polynomials and the Schur measure.

#include "tilings/common.hpp"
#include "tilings/growth.hpp"
#include "tilings/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <vector>

namespace tilings {

using Partition = std::vector<int>;

// One level of the cascade. Boundary b sits at x = b + 1/2, between columns
// b and b+1. A boundary holds either an up-step (left vertical side, labels
// +j for a_j) or a down-step (right vertical side, labels -k for b_k),
// listed bottom to top.
struct LabelledHeightCurve {
  int offset = 0;  // boundary b is stored at index b + offset
  int base = 0;    // height far to the left
  std::vector<std::vector<int>> sides;

  LabelledHeightCurve() = default;
  LabelledHeightCurve(int radius, int base_height)
      : offset(radius), base(base_height), sides(static_cast<std::size_t>(2 * radius + 1)) {}

  int lo() const { return -offset; }
  int hi() const { return static_cast<int>(sides.size()) - 1 - offset; }
  std::vector<int>& side(int b) {
    require(b >= lo() && b <= hi(), "internal", "cascade boundary out of range");
    return sides[static_cast<std::size_t>(b + offset)];
  }
  const std::vector<int>& side(int b) const {
    require(b >= lo() && b <= hi(), "internal", "cascade boundary out of range");
    return sides[static_cast<std::size_t>(b + offset)];
  }
  bool is_up(int b) const { return !side(b).empty() && side(b).front() > 0; }
  bool is_down(int b) const { return !side(b).empty() && side(b).front() < 0; }
  // Signed size of boundary b: +units for up, -units for down.
  int jump(int b) const {
    const auto& s = side(b);
    return s.empty() ? 0 : (s.front() > 0 ? 1 : -1) * static_cast<int>(s.size());
  }
  // Height of column x.
  int height(int x) const {
    int h = base;
    for (int b = lo(); b < x && b <= hi(); ++b) h += jump(b);
    return h;
  }
  // Heights of columns lo()..hi()+1.
  std::vector<int> heights() const {
    std::vector<int> h;
    h.reserve(sides.size() + 1);
    int cur = base;
    h.push_back(cur);
    for (int b = lo(); b <= hi(); ++b) {
      cur += jump(b);
      h.push_back(cur);
    }
    return h;
  }
  bool flat() const {
    for (const auto& s : sides)
      if (!s.empty()) return false;
    return true;
  }
  bool operator==(const LabelledHeightCurve&) const = default;
};

struct Square2 {
  int a = 0, b = 0;  // label indices, both >= 1
};

using SquareBuffer = std::map<int, std::vector<Square2>>;  // column -> squares, bottom-up

struct Cascade {
  int n = 0;
  int time = 0;
  std::vector<LabelledHeightCurve> levels;  // levels[k-1] is level k
  bool operator==(const Cascade&) const = default;
};

struct CascadeResult {
  Cascade final_state;
  Partition lambda;
  std::vector<std::vector<int>> gamma;        // a-labels per level, sorted (semistandard tableau rows)
  std::vector<std::vector<int>> gamma_tilde;  // b-labels per level, sorted
  std::vector<std::vector<int>> level_one;    // h_1(x, t), t = 0..2n-1, x = -radius..radius
  int radius = 0;
};

namespace detail {

inline void check_parity(const LabelledHeightCurve& c) {
  int up_parity = -1, down_parity = -1;
  for (int b = c.lo(); b <= c.hi(); ++b) {
    const auto& s = c.side(b);
    if (s.empty()) continue;
    for (int l : s)
      if ((l > 0) != (s.front() > 0)) throw Error("internal", "boundary mixes left and right sides");
    int par = ((b % 2) + 2) % 2;
    int& slot = s.front() > 0 ? up_parity : down_parity;
    if (slot == -1) slot = par;
    if (slot != par) throw Error("internal", "vertical sides lost their common parity");
  }
  if (up_parity != -1 && up_parity == down_parity)
    throw Error("internal", "left and right vertical sides at even distance");
}

// Horizontal growth: up-steps move left, down-steps right; crossings drop
// min(u,v) squares, paired bottom-up, into `dropped`.
inline LabelledHeightCurve horizontal_growth(const LabelledHeightCurve& c, SquareBuffer& dropped) {
  LabelledHeightCurve out(c.offset, c.base);
  auto place = [&](int b, std::vector<int> labels) {
    if (labels.empty()) return;
    require(b > out.lo() && b < out.hi(), "internal", "cascade grew past its radius");
    auto& dst = out.side(b);
    if (!dst.empty()) throw Error("internal", "two vertical sides collided");
    dst = std::move(labels);
  };
  for (int b = c.lo(); b <= c.hi(); ++b) {
    if (c.is_down(b) && b + 1 <= c.hi() && c.is_up(b + 1)) {
      const auto& d = c.side(b);
      const auto& u = c.side(b + 1);
      const std::size_t z = std::min(d.size(), u.size());
      const int x = b + 1;
      auto& sq = dropped[x];
      for (std::size_t i = 0; i < z; ++i) sq.push_back({u[i], -d[i]});
      if (d.size() > z) place(x, std::vector<int>(d.begin() + static_cast<long>(z), d.end()));
      if (u.size() > z) place(x - 1, std::vector<int>(u.begin() + static_cast<long>(z), u.end()));
      ++b;  // the up-step at b+1 is consumed
      continue;
    }
    if (c.is_up(b)) place(b - 1, c.side(b));
    if (c.is_down(b)) place(b + 1, c.side(b));
  }
  return out;
}

inline void vertical_growth(LabelledHeightCurve& c, const SquareBuffer& squares) {
  for (const auto& [x, list] : squares) {
    if (list.empty()) continue;
    auto& left = c.side(x - 1);
    auto& right = c.side(x);
    if (c.is_down(x - 1) || c.is_up(x))
      throw Error("internal", "squares stacked on a column that is not a plateau");
    for (const auto& s : list) {
      left.push_back(s.a);
      right.push_back(-s.b);
    }
  }
}

}  // namespace detail

inline int cascade_radius(int n) { return 3 * n + 4; }

inline CascadeResult cascade_grow(const WeightMatrix& W) {
  require(W.M == W.N, "domain", "cascade needs a square matrix");
  const int n = W.M;
  for (auto v : W.w) require(v >= 0, "validation", "matrix entries must be nonnegative");
  CascadeResult res;
  res.radius = cascade_radius(n);
  Cascade& cas = res.final_state;
  cas.n = n;
  for (int k = 1; k <= n; ++k) cas.levels.emplace_back(res.radius, -(k - 1));
  auto record_level_one = [&]() {
    if (n == 0) return;
    auto h = cas.levels[0].heights();
    res.level_one.emplace_back(h.begin(), h.end() - 1);
  };
  record_level_one();
  for (int m = 1; m <= 2 * n - 1; ++m) {
    SquareBuffer incoming;
    for (int i = 1; i <= n; ++i) {
      int j = m + 1 - i;
      if (j < 1 || j > n || W(i, j) == 0) continue;
      incoming[i - j].assign(static_cast<std::size_t>(W(i, j)), Square2{i, j});
    }
    for (int l = 0; l < n; ++l) {
      SquareBuffer dropped;
      cas.levels[l] = detail::horizontal_growth(cas.levels[l], dropped);
      detail::vertical_growth(cas.levels[l], incoming);
      detail::check_parity(cas.levels[l]);
      incoming = std::move(dropped);
    }
    for (const auto& [x, list] : incoming)
      if (!list.empty()) throw Error("internal", "squares fell below the last level");
    for (int l = 0; l + 1 < n; ++l) {
      auto upper = cas.levels[l].heights(), lower = cas.levels[l + 1].heights();
      for (std::size_t x = 0; x < upper.size(); ++x)
        if (upper[x] - lower[x] < 1) throw Error("internal", "cascade levels touched");
    }
    cas.time = m;
    record_level_one();
  }
  res.lambda.resize(static_cast<std::size_t>(n));
  res.gamma.resize(static_cast<std::size_t>(n));
  res.gamma_tilde.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const auto& c = cas.levels[k - 1];
    res.lambda[k - 1] = c.height(0) + k - 1;
    for (int b = c.lo(); b <= c.hi(); ++b) {
      for (int l : c.side(b)) {
        if (l > 0) {
          if (b != 2 * (l - n) - 1) throw Error("internal", "left label ended at the wrong place");
          res.gamma[k - 1].push_back(l);
        } else {
          if (b != 2 * (n + l)) throw Error("internal", "right label ended at the wrong place");
          res.gamma_tilde[k - 1].push_back(-l);
        }
      }
    }
    std::sort(res.gamma[k - 1].begin(), res.gamma[k - 1].end());
    std::sort(res.gamma_tilde[k - 1].begin(), res.gamma_tilde[k - 1].end());
  }
  return res;
}

// Final cascade state determined by two semistandard tableaux of the same
// shape with entries in 1..n.
inline Cascade cascade_from_tableaux(int n, const std::vector<std::vector<int>>& T,
                                     const std::vector<std::vector<int>>& D) {
  require(static_cast<int>(T.size()) <= n && T.size() == D.size(), "validation",
          "tableaux must have equal row counts at most n");
  Cascade cas;
  cas.n = n;
  cas.time = 2 * n - 1;
  const int R = cascade_radius(n);
  for (int k = 1; k <= n; ++k) {
    LabelledHeightCurve c(R, -(k - 1));
    if (k <= static_cast<int>(T.size())) {
      require(T[k - 1].size() == D[k - 1].size(), "validation", "tableau shapes differ");
      for (int j : T[k - 1]) {
        require(j >= 1 && j <= n, "validation", "tableau entry out of range");
        c.side(2 * (j - n) - 1).push_back(j);
      }
      for (int j : D[k - 1]) {
        require(j >= 1 && j <= n, "validation", "tableau entry out of range");
        c.side(2 * (n - j)).push_back(-j);
      }
    }
    cas.levels.push_back(std::move(c));
  }
  return cas;
}

// Reverse growth: bottom level first, right sides move left and left sides
// right; squares removed at the top level give the matrix entries.
inline WeightMatrix cascade_invert(const Cascade& final_state) {
  const int n = final_state.n;
  require(static_cast<int>(final_state.levels.size()) == n, "validation",
          "cascade must have n levels");
  std::vector<LabelledHeightCurve> lv = final_state.levels;
  for (int k = 1; k <= n; ++k)
    require(lv[k - 1].base == -(k - 1), "validation", "cascade level has the wrong base height");
  WeightMatrix W(n, n);
  auto reject = [](const std::string& why) {
    throw Error("validation", "not a valid cascade image: " + why);
  };
  try {
    for (int k = 0; k < n; ++k) detail::check_parity(lv[k]);
  } catch (const Error& e) {
    reject(e.what());
  }
  for (int m = 2 * n - 1; m >= 1; --m) {
    SquareBuffer from_below;  // squares restored at the current level
    for (int l = n - 1; l >= 0; --l) {
      LabelledHeightCurve& c = lv[l];
      // Undo vertical growth: width-1 peaks lose min(u,v) top squares.
      SquareBuffer lifted;
      for (int b = c.lo(); b < c.hi(); ++b) {
        if (!(c.is_up(b) && c.is_down(b + 1))) continue;
        auto& u = c.side(b);
        auto& d = c.side(b + 1);
        const std::size_t z = std::min(u.size(), d.size());
        auto& sq = lifted[b + 1];
        for (std::size_t i = 0; i < z; ++i)
          sq.push_back({u[u.size() - z + i], -d[d.size() - z + i]});
        u.resize(u.size() - z);
        d.resize(d.size() - z);
      }
      // Undo horizontal growth.
      LabelledHeightCurve back(c.offset, c.base);
      for (int b = c.lo(); b <= c.hi(); ++b) {
        if (c.side(b).empty()) continue;
        int target = c.is_up(b) ? b + 1 : b - 1;
        if (target < back.lo() || target > back.hi()) reject("side left the window");
        auto& dst = back.side(target);
        if (!dst.empty()) reject("vertical sides collide in reverse");
        dst = c.side(b);
      }
      for (const auto& [x, list] : from_below) {
        if (list.empty()) continue;
        if (back.is_up(x - 1) || back.is_down(x)) reject("restored crossing is inconsistent");
        auto& d = back.side(x - 1);
        auto& u = back.side(x);
        std::vector<int> dl, ul;
        for (const auto& s : list) {
          dl.push_back(-s.b);
          ul.push_back(s.a);
        }
        d.insert(d.begin(), dl.begin(), dl.end());
        u.insert(u.begin(), ul.begin(), ul.end());
      }
      try {
        detail::check_parity(back);
      } catch (const Error& e) {
        reject(e.what());
      }
      c = std::move(back);
      from_below = std::move(lifted);
    }
    // Squares lifted off the top level are matrix entries.
    for (const auto& [x, list] : from_below) {
      if (list.empty()) continue;
      if ((m + x) % 2 == 0) reject("square at a position with no matrix entry");
      int i = (m + x + 1) / 2, j = (m - x + 1) / 2;
      if (i < 1 || i > n || j < 1 || j > n) reject("square outside the matrix");
      for (const auto& s : list)
        if (s.a != i || s.b != j) reject("square labels do not match its position");
      W(i, j) += static_cast<std::int64_t>(list.size());
    }
  }
  for (const auto& c : lv)
    if (!c.flat()) reject("levels are not flat at time 0");
  return W;
}

// G(M,N) = h_1(M-N, M+N-1) for all 1 <= M, N <= n.
inline bool height_equals_lpp(const WeightMatrix& W) {
  auto res = cascade_grow(W);
  auto G = lpp_value(W);
  const int n = W.M;
  for (int M = 1; M <= n; ++M)
    for (int N = 1; N <= n; ++N) {
      int x = M - N, t = M + N - 1;
      if (res.level_one[t][x + res.radius] != G(M, N)) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Schur polynomials and the Schur measure

// h_0..h_maxdeg of the given variables.
template <class T>
std::vector<T> complete_homogeneous(const std::vector<T>& a, int maxdeg) {
  std::vector<T> h(static_cast<std::size_t>(std::max(maxdeg, 0) + 1), T(0));
  h[0] = T(1);
  for (const T& x : a)
    for (int m = 1; m <= maxdeg; ++m) h[m] = h[m] + x * h[m - 1];
  return h;
}

inline void validate_partition(const Partition& lambda) {
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    require(lambda[i] >= 0, "validation", "partition parts must be nonnegative");
    require(i == 0 || lambda[i] <= lambda[i - 1], "validation", "partition must be weakly decreasing");
  }
}

inline int partition_length(const Partition& lambda) {
  int l = 0;
  for (int p : lambda) l += p > 0;
  return l;
}

// Jacobi-Trudi determinant det(h_{lambda_j - j + k}(a)).
inline Rational schur_poly(const Partition& lambda, const std::vector<Rational>& a) {
  validate_partition(lambda);
  const int L = partition_length(lambda);
  require(L <= static_cast<int>(a.size()), "domain", "partition longer than the variable list");
  if (L == 0) return 1;
  auto h = complete_homogeneous(a, lambda[0] + L);
  RationalMatrix m(static_cast<std::size_t>(L), std::vector<Rational>(static_cast<std::size_t>(L)));
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k) {
      int d = lambda[j] - j + k;
      m[j][k] = d < 0 ? Rational(0) : h[d];
    }
  return rational_det(m);
}

inline double schur_poly(const Partition& lambda, const std::vector<double>& a) {
  validate_partition(lambda);
  const int L = partition_length(lambda);
  require(L <= static_cast<int>(a.size()), "domain", "partition longer than the variable list");
  if (L == 0) return 1.0;
  auto h = complete_homogeneous(a, lambda[0] + L);
  Eigen::MatrixXd m(L, L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k) {
      int d = lambda[j] - j + k;
      m(j, k) = d < 0 ? 0.0 : h[d];
    }
  return dense_det(m);
}

// s_lambda(1^m) = prod_{i<j<=m} (lambda_i - lambda_j + j - i) / (j - i).
inline Rational schur_at_ones(const Partition& lambda, int m) {
  validate_partition(lambda);
  require(partition_length(lambda) <= m, "domain", "partition longer than m");
  auto part = [&](int i) { return i <= static_cast<int>(lambda.size()) ? lambda[i - 1] : 0; };
  Rational r = 1;
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) r *= Rational(part(i) - part(j) + j - i, j - i);
  return r;
}

template <class T>
void require_schur_parameters(const std::vector<T>& a, const std::vector<T>& b) {
  require(!a.empty() && a.size() == b.size(), "domain", "a and b must have the same length n >= 1");
  for (const T& x : a) require(x > 0 && x < 1, "domain", "parameters must lie in (0,1)");
  for (const T& x : b) require(x > 0 && x < 1, "domain", "parameters must lie in (0,1)");
  for (const T& x : a)
    for (const T& y : b) require(x * y < 1, "domain", "need a_i b_j < 1");
}

inline double schur_measure_prob(const Partition& lambda, const std::vector<double>& a,
                                 const std::vector<double>& b) {
  require_schur_parameters(a, b);
  double z = 1;
  for (double x : a)
    for (double y : b) z *= 1 - x * y;
  return std::max(0.0, z * schur_poly(lambda, a) * schur_poly(lambda, b));
}

inline Rational schur_measure_prob(const Partition& lambda, const std::vector<Rational>& a,
                                   const std::vector<Rational>& b) {
  require_schur_parameters(a, b);
  Rational z = 1;
  for (const auto& x : a)
    for (const auto& y : b) z *= 1 - x * y;
  return z * schur_poly(lambda, a) * schur_poly(lambda, b);
}

// W with P[w(j,k) = m] = (1 - a_j b_k)(a_j b_k)^m.
inline WeightMatrix sample_schur_matrix(const std::vector<double>& a, const std::vector<double>& b,
                                        Rng& rng) {
  require_schur_parameters(a, b);
  const int n = static_cast<int>(a.size());
  WeightMatrix W(n, n);
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k) W(j, k) = sample_geometric(a[j - 1] * b[k - 1], rng);
  return W;
}

// All partitions with at most n parts and largest part at most cap.
inline std::vector<Partition> partitions_in_box(int n, int cap) {
  std::vector<Partition> out;
  Partition cur;
  auto rec = [&](auto&& self, int maxpart) -> void {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (int p = 0; p <= maxpart; ++p) {
      cur.push_back(p);
      self(self, p);
      cur.pop_back();
    }
  };
  rec(rec, cap);
  return out;
}

}  // namespace tilings

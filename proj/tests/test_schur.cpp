#include "tilings/schur.hpp"
#include "tilings/stats.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace tilings;

namespace {

WeightMatrix random_matrix(int n, int maxval, Rng& rng) {
  WeightMatrix W(n, n);
  std::uniform_int_distribution<int> d(0, maxval);
  for (auto& x : W.w) x = d(rng);
  return W;
}

// Sum over semistandard tableaux of shape lambda with entries <= a.size().
Rational ssyt_sum(const Partition& lambda, const std::vector<Rational>& a) {
  const int m = static_cast<int>(a.size());
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < static_cast<int>(lambda.size()); ++r)
    for (int c = 0; c < lambda[r]; ++c) cells.push_back({r, c});
  std::map<std::pair<int, int>, int> fill;
  Rational total = 0;
  auto rec = [&](auto&& self, std::size_t pos, Rational w) -> void {
    if (pos == cells.size()) {
      total += w;
      return;
    }
    auto [r, c] = cells[pos];
    int lo = 1;
    if (c > 0) lo = std::max(lo, fill[{r, c - 1}]);
    if (r > 0) lo = std::max(lo, fill[{r - 1, c}] + 1);
    for (int v = lo; v <= m; ++v) {
      fill[{r, c}] = v;
      self(self, pos + 1, w * a[v - 1]);
    }
  };
  rec(rec, 0, Rational(1));
  return total;
}

bool is_ssyt(const std::vector<std::vector<int>>& rows) {
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0 && rows[r][c] < rows[r][c - 1]) return false;
      if (r > 0 && (c >= rows[r - 1].size() || rows[r][c] <= rows[r - 1][c])) return false;
    }
  return true;
}

// Row insertion RSK on the two-line array of W, as an independent oracle.
std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>> rsk(const WeightMatrix& W) {
  std::vector<std::vector<int>> P, Q;
  for (int i = 1; i <= W.M; ++i)
    for (int j = 1; j <= W.N; ++j)
      for (int c = 0; c < W(i, j); ++c) {
        int x = j;
        std::size_t r = 0;
        while (true) {
          if (r == P.size()) {
            P.push_back({x});
            Q.push_back({i});
            break;
          }
          auto it = std::upper_bound(P[r].begin(), P[r].end(), x);
          if (it == P[r].end()) {
            P[r].push_back(x);
            Q[r].push_back(i);
            break;
          }
          std::swap(x, *it);
          ++r;
        }
      }
  return {P, Q};
}

}  // namespace

TEST(Cascade, TrivialCases) {
  WeightMatrix Z(3, 3);
  auto r = cascade_grow(Z);
  EXPECT_EQ(r.lambda, (Partition{0, 0, 0}));
  for (const auto& c : r.final_state.levels) EXPECT_TRUE(c.flat());
  EXPECT_EQ(cascade_invert(r.final_state).w, Z.w);
  WeightMatrix one(1, 1);
  one(1, 1) = 4;
  EXPECT_EQ(cascade_grow(one).lambda, (Partition{4}));
  WeightMatrix ones(2, 2);
  for (auto& x : ones.w) x = 1;
  auto ro = cascade_grow(ones);
  EXPECT_EQ(ro.lambda, (Partition{3, 1}));
  EXPECT_EQ(cascade_invert(ro.final_state).w, ones.w);
}

TEST(Cascade, RoundTripAndRskAgreement) {
  Rng rng = make_rng(17);
  for (int rep = 0; rep < 3000; ++rep) {
    int n = 1 + rep % 5;
    WeightMatrix W = random_matrix(n, rep % 3 == 0 ? 5 : 2, rng);
    auto r = cascade_grow(W);
    EXPECT_EQ(cascade_invert(r.final_state).w, W.w);
    EXPECT_TRUE(is_ssyt(r.gamma));
    EXPECT_TRUE(is_ssyt(r.gamma_tilde));
    for (int k = 0; k < n; ++k) {
      EXPECT_EQ(static_cast<int>(r.gamma[k].size()), r.lambda[k]);
      EXPECT_EQ(static_cast<int>(r.gamma_tilde[k].size()), r.lambda[k]);
    }
    // Same shape as Knuth's row insertion.
    auto [P, Q] = rsk(W);
    Partition shape(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < P.size(); ++k) shape[k] = static_cast<int>(P[k].size());
    EXPECT_EQ(r.lambda, shape);
    // The final state is determined by the two tableaux.
    EXPECT_TRUE(cascade_from_tableaux(n, r.gamma, r.gamma_tilde) == r.final_state);
  }
}

TEST(Cascade, LevelOneRecursion) {
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 4;
    WeightMatrix W = random_matrix(n, 3, rng);
    auto r = cascade_grow(W);
    const int R = r.radius;
    for (int t = 1; t <= 2 * n - 1; ++t)
      for (int x = -R + 1; x < R; ++x) {
        int prev = std::max({r.level_one[t - 1][x - 1 + R], r.level_one[t - 1][x + R],
                             r.level_one[t - 1][x + 1 + R]});
        std::int64_t w = 0;
        if ((t + x) % 2 != 0) {
          int i = (t + x + 1) / 2, j = (t - x + 1) / 2;
          if (i >= 1 && i <= n && j >= 1 && j <= n) w = W(i, j);
        }
        EXPECT_EQ(r.level_one[t][x + R], prev + w);
      }
  }
}

TEST(Cascade, HeightEqualsLastPassage) {
  Rng rng = make_rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    WeightMatrix W = random_matrix(5, 4, rng);
    EXPECT_TRUE(height_equals_lpp(W));
    EXPECT_EQ(cascade_grow(W).lambda[0], lpp_value(W)(5, 5));
  }
}

TEST(Cascade, ExhaustiveInjectivityAndWeightTransport) {
  // All 2x2 matrices with entries <= 2: distinct images, exact weights.
  std::set<std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>>> images;
  const std::vector<Rational> a{Rational(1, 3), Rational(2, 7)}, b{Rational(3, 5), Rational(1, 2)};
  for (int code = 0; code < 81; ++code) {
    WeightMatrix W(2, 2);
    int c = code;
    for (auto& x : W.w) {
      x = c % 3;
      c /= 3;
    }
    auto r = cascade_grow(W);
    EXPECT_TRUE(images.insert({r.gamma, r.gamma_tilde}).second);
    Rational wW = 1, wG = 1;
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k) wW *= rational_pow(a[j - 1] * b[k - 1], static_cast<long>(W(j, k)));
    for (auto& row : r.gamma)
      for (int l : row) wG *= a[l - 1];
    for (auto& row : r.gamma_tilde)
      for (int l : row) wG *= b[l - 1];
    EXPECT_EQ(wW, wG);
  }
  EXPECT_EQ(images.size(), 81u);
}

TEST(Cascade, InvertRejectsInvalidImages) {
  // Shapes agree but the right tableau is not semistandard-compatible with any matrix.
  Cascade bad = cascade_from_tableaux(2, {{1, 1}, {1}}, {{1, 2}, {2}});
  EXPECT_THROW(cascade_invert(bad), Error);
  Cascade wrong_level = cascade_from_tableaux(2, {{2}}, {{1}});
  wrong_level.levels[1].side(0).push_back(-1);
  EXPECT_THROW(cascade_invert(wrong_level), Error);
}

TEST(Schur, SmallValues) {
  using R = Rational;
  EXPECT_EQ(schur_poly({1}, std::vector<R>{R(2), R(5)}), R(7));
  EXPECT_EQ(schur_poly({2, 1}, std::vector<R>{R(1), R(1), R(1)}), R(8));
  EXPECT_EQ(schur_poly({}, std::vector<R>{R(3)}), R(1));
  EXPECT_THROW(schur_poly({1, 1, 1}, std::vector<R>{R(1), R(1)}), Error);
  EXPECT_NEAR(schur_poly({2, 1}, std::vector<double>{0.5, 0.25, 0.125}),
              to_double(schur_poly({2, 1}, std::vector<R>{R(1, 2), R(1, 4), R(1, 8)})), 1e-15);
}

TEST(Schur, JacobiTrudiMatchesTableaux) {
  const std::vector<Rational> a{Rational(1, 2), Rational(2, 3), Rational(3), Rational(1, 5)};
  for (int n = 1; n <= 6; ++n)
    for (auto& lam : partitions_in_box(4, n)) {
      int size = 0;
      for (int p : lam) size += p;
      if (size > 6) continue;
      EXPECT_EQ(schur_poly(lam, a), ssyt_sum(lam, a));
    }
}

TEST(Schur, HookContentAtOnes) {
  Rng rng = make_rng(2);
  for (int rep = 0; rep < 60; ++rep) {
    int m = 1 + rep % 6;
    Partition lam(static_cast<std::size_t>(m));
    std::uniform_int_distribution<int> d(0, 5);
    for (auto& p : lam) p = d(rng);
    std::sort(lam.rbegin(), lam.rend());
    std::vector<Rational> ones(static_cast<std::size_t>(m), Rational(1));
    EXPECT_EQ(schur_poly(lam, ones), schur_at_ones(lam, m));
  }
}

TEST(SchurMeasure, CauchySumAndEmptyShape) {
  std::vector<double> a{0.4, 0.3}, b{0.4, 0.3};
  double z = 1;
  for (double x : a)
    for (double y : b) z *= 1 - x * y;
  EXPECT_NEAR(schur_measure_prob({0, 0}, a, b), z, 1e-15);
  double total = 0;
  for (auto& lam : partitions_in_box(2, 12)) total += schur_measure_prob(lam, a, b);
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_THROW(schur_measure_prob({1}, std::vector<double>{0.4, 1.2}, b), Error);
  // Exact Cauchy identity truncated: remainder equals the mass above the cap.
  std::vector<Rational> ar{Rational(1, 3), Rational(1, 4)};
  Rational s = 0;
  for (auto& lam : partitions_in_box(2, 30)) s += schur_measure_prob(lam, ar, ar);
  EXPECT_LT(to_double(1 - s), 1e-12);
  EXPECT_GT(to_double(1 - s), 0);
}

TEST(SchurMeasure, CascadeShapeFrequencies) {
  std::vector<double> a{0.4, 0.3}, b{0.4, 0.3};
  auto shapes = partitions_in_box(2, 14);
  std::map<Partition, std::size_t> index;
  std::vector<double> probs;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    index[shapes[i]] = i;
    probs.push_back(schur_measure_prob(shapes[i], a, b));
  }
  double tail = 1 - std::accumulate(probs.begin(), probs.end(), 0.0);
  probs.push_back(std::max(tail, 0.0));
  std::vector<long> counts(probs.size(), 0);
  Rng rng = make_rng(8);
  for (int s = 0; s < 100000; ++s) {
    auto lam = cascade_grow(sample_schur_matrix(a, b, rng)).lambda;
    auto it = index.find(lam);
    counts[it == index.end() ? shapes.size() : it->second]++;
  }
  EXPECT_GT(chi_square_test(counts, probs).p_value, 1e-3);
}

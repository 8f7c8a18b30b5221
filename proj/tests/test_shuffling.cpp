#include "tilings/shuffling.hpp"
#include "tilings/stats.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace tilings;

namespace {

std::vector<Domino> sorted(std::vector<Domino> d) {
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

TEST(Enumerate, CountsAndTotalWeight) {
  EXPECT_EQ(enumerate_tilings(0, 1).size(), 1u);
  const std::size_t expect[] = {1, 2, 8, 64, 1024};
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(enumerate_tilings(n, 1).size(), expect[n]);
  for (Rational w : {Rational(1), Rational(2), Rational(1, 3)}) {
    for (int n = 1; n <= 3; ++n) {
      Rational total = 0;
      for (auto& t : enumerate_tilings(n, w)) total += t.weight;
      EXPECT_EQ(total, rational_pow(1 + w * w, n * (n + 1) / 2));
    }
  }
}

TEST(Enumerate, RefusesLargeOrder) {
  try {
    enumerate_tilings(6, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "infeasible");
    EXPECT_NE(std::string(e.what()).find("2^21"), std::string::npos);
  }
}

TEST(VerticalLaw, MatchesEnumeration) {
  EXPECT_NEAR(vertical_count_law(1, 0.5)[0], 0.5, 1e-15);
  EXPECT_NEAR(vertical_count_law(1, 0.5)[1], 0.5, 1e-15);
  for (Rational w : {Rational(1), Rational(2)}) {
    Rational q = w * w / (1 + w * w);
    for (int n = 1; n <= 4; ++n) {
      auto law = vertical_count_law_exact(n, q);
      std::vector<Rational> got(law.size(), 0);
      Rational total = 0;
      for (auto& t : enumerate_tilings(n, w)) {
        got[vertical_count(t.tiling) / 2] += t.weight;
        total += t.weight;
      }
      for (std::size_t k = 0; k < law.size(); ++k) EXPECT_EQ(got[k] / total, law[k]);
      auto approx = vertical_count_law(n, to_double(q));
      for (std::size_t k = 0; k < law.size(); ++k)
        EXPECT_NEAR(approx[k], to_double(law[k]), 1e-13);
    }
  }
}

TEST(Shuffle, StagesAreValidTilings) {
  Rng rng = make_rng(11);
  int stages = 0;
  Tiling t = sample_aztec({12, 1.3}, rng, [&](const Tiling& s) {
    ++stages;
    EXPECT_EQ(s.order, stages);
    EXPECT_NO_THROW(validate_tiling(s));
    EXPECT_EQ(vertical_count(s) % 2, 0);
  });
  EXPECT_EQ(stages, 12);
  EXPECT_NO_THROW(height_function(t));
}

TEST(Shuffle, OrderOneLaw) {
  Rng rng = make_rng(3);
  int vertical = 0;
  const int reps = 40000;
  auto m = AztecMeasure::from_q(1, 0.3);
  for (int i = 0; i < reps; ++i) vertical += vertical_count(sample_aztec(m, rng)) == 2;
  double sigma = std::sqrt(0.3 * 0.7 / reps);
  EXPECT_NEAR(vertical / double(reps), 0.3, 4 * sigma);
}

TEST(Shuffle, ExactLawSmallOrders) {
  for (int n = 2; n <= 3; ++n) {
    for (int w : {1, 2}) {
      auto all = enumerate_tilings(n, w);
      std::map<std::vector<Domino>, std::size_t> index;
      Rational total = 0;
      for (std::size_t i = 0; i < all.size(); ++i) {
        index[sorted(all[i].tiling.dominoes)] = i;
        total += all[i].weight;
      }
      std::vector<double> probs;
      for (auto& t : all) probs.push_back(to_double(t.weight / total));
      std::vector<long> counts(all.size(), 0);
      Rng rng = make_rng(100 + n * 10 + w);
      for (int s = 0; s < 50000; ++s) {
        Tiling t = sample_aztec({n, double(w)}, rng);
        counts[index.at(sorted(t.dominoes))]++;
      }
      EXPECT_GT(chi_square_test(counts, probs).p_value, 1e-4);
    }
  }
}

TEST(Shuffle, Deterministic) {
  Rng a = make_rng(42, 5), b = make_rng(42, 5);
  EXPECT_TRUE(sample_aztec({20, 1.0}, a) == sample_aztec({20, 1.0}, b));
}

TEST(ZigZagLaw, EqualsKrawtchoukEnsembleExactly) {
  for (int n = 1; n <= 4; ++n)
    for (int w : {1, 2})
      for (int r = 1; r <= n; ++r) EXPECT_EQ(zigzag_krawtchouk_tv(n, r, w), 0) << n << " " << w << " " << r;
  // The complementary parameter is distinguishable once w != 1.
  auto law = zigzag_law_enumerated(3, 2, 2);
  Rational tv = 0;
  for (auto& [h, p] : law) {
    Rational d = p - krawtchouk_ensemble_mass(h, 3, Rational(1, 5));
    tv += d < 0 ? Rational(-d) : d;
  }
  EXPECT_GT(tv, Rational(1, 2));
}

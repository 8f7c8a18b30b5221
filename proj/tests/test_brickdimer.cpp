#include "tilings/brickdimer.hpp"

#include <gtest/gtest.h>

using namespace tilings;

namespace {

const DimerSpectrum kPrinted = DimerSpectrum::printed;
const DimerSpectrum kAbsorbing = DimerSpectrum::absorbing;

// (P^{2M})_{2x,2y} for x, y in 0..N.
Eigen::MatrixXd even_block_power(int M, int N) {
  Eigen::MatrixXd P = absorbing_walk_matrix(N), Q = Eigen::MatrixXd::Identity(2 * N + 1, 2 * N + 1);
  for (int i = 0; i < 2 * M; ++i) Q = Q * P;
  Eigen::MatrixXd out(N + 1, N + 1);
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y) out(x, y) = Q(2 * x, 2 * y);
  return out;
}

double eigen_residual(int M, int N, DimerSpectrum sp) {
  auto modes = dimer_modes(BrickSpec(M, N, 1, 1, sp));
  auto B = even_block_power(M, N);
  double worst = 0;
  for (const auto& m : modes) {
    Eigen::Map<const Eigen::VectorXd> v(m.phi.data(), N + 1);
    Eigen::VectorXd r = B * v - std::exp(m.log_w) * v;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST(BrickPhi, OrthogonalityAndValues) {
  EXPECT_NEAR(phi(1, 0, 0), 1 / std::sqrt(2.0), 1e-15);
  for (int N : {1, 2, 7, 64}) {
    for (auto sp : {kPrinted, kAbsorbing}) {
      auto modes = dimer_modes(BrickSpec(1, N, 1, 1, sp));
      Eigen::MatrixXd F(N + 1, modes.size());
      for (std::size_t j = 0; j < modes.size(); ++j)
        for (int x = 0; x <= N; ++x) F(x, j) = modes[j].phi[x];
      EXPECT_LT((F.transpose() * F - Eigen::MatrixXd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
  EXPECT_THROW(phi(3, 4, 0), Error);
}

TEST(BrickPhi, EigenRelationAgainstTransitionPower) {
  // The absorbing-walk spectrum diagonalizes the even block of P^{2M}; the
  // printed cosine spectrum does not.
  for (int N : {1, 3, 8, 64})
    for (int M : {1, 2, 5}) {
      EXPECT_LT(eigen_residual(M, N, kAbsorbing), 1e-10) << M << "," << N;
      EXPECT_GT(eigen_residual(M, N, kPrinted), 1e-3) << M << "," << N;
    }
}

TEST(BrickKernel, SpectrumAndTrace) {
  for (auto sp : {kPrinted, kAbsorbing}) {
    BrickSpec s(3, 10, 1.0, 0.8, sp);
    auto K = dimer_kernel(s);
    EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LT(es.eigenvalues().maxCoeff(), 1.0);
    double sum = 0;
    for (double u : dimer_activations(s)) sum += u;
    EXPECT_NEAR(K.trace(), sum, 1e-12);
  }
  // Large M in log space: no overflow.
  auto u = dimer_activations(BrickSpec(5000, 20, 1.0, 3.0, kAbsorbing));
  for (double x : u) EXPECT_TRUE(x >= 0 && x < 1 + 1e-15);
}

TEST(BrickEnumeration, SmallestCylinder) {
  auto poly = dimer_polynomial(1, 1);
  // z^3 + 2 z w^2: one all-horizontal cover and the two walks 0-1-0, 2-1-2.
  std::map<std::pair<int, int>, long> expect{{{3, 0}, 1}, {{1, 2}, 2}};
  EXPECT_EQ(poly, expect);
  for (double z : {0.7, 1.0, 1.9})
    for (double w : {0.2, 1.0, 2.5}) {
      double exact = z * z * z + 2 * z * w * w;
      EXPECT_NEAR(partition_function(BrickSpec(1, 1, z, w, kAbsorbing)), exact, 1e-12 * exact);
      // The printed product gives z^3 + 4 z w^2.
      EXPECT_NEAR(partition_function(BrickSpec(1, 1, z, w, kPrinted)), z * z * z + 4 * z * w * w,
                  1e-12 * exact);
    }
  EXPECT_THROW(enumerate_dimers(3, 2), Error);
}

TEST(BrickEnumeration, PathBijection) {
  for (auto [M, N] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}}) {
    BrickGraph g(M, N);
    auto covers = enumerate_dimers(M, N);
    std::set<std::vector<int>> seen;
    for (const auto& c : covers) {
      EXPECT_TRUE(seen.insert(c.edges).second);
      EXPECT_EQ(c.horizontal + c.vertical, M * (2 * N + 1));
      auto f = cover_to_paths(g, c);
      EXPECT_EQ(c.vertical, 2 * M * static_cast<int>(f.heights.size()));
      EXPECT_LE(static_cast<int>(f.heights.size()), N);
      EXPECT_EQ(paths_to_cover(g, f), c);
    }
  }
}

TEST(BrickPartition, AbsorbingSpectrumMatchesEnumeration) {
  Rng rng = make_rng(10);
  std::uniform_real_distribution<double> d(0.3, 2.0);
  for (auto [M, N] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}})
    for (int r = 0; r < 5; ++r) {
      double z = d(rng), w = d(rng);
      double brute = enumerated_partition_function(M, N, z, w);
      EXPECT_NEAR(partition_function(BrickSpec(M, N, z, w, kAbsorbing)) / brute, 1.0, 1e-12);
    }
  // The printed product disagrees, e.g. (2,2) at z = 1, w = 0.7.
  EXPECT_NEAR(enumerated_partition_function(2, 2, 1, 0.7), 3.91983209, 1e-8);
  EXPECT_GT(std::abs(partition_function(BrickSpec(2, 2, 1, 0.7, kPrinted)) - 3.91983209), 1.0);
}

TEST(BrickPartition, FrozenLimit) {
  for (auto sp : {kPrinted, kAbsorbing}) {
    BrickSpec s(3, 4, 1.3, 1e-6, sp);
    EXPECT_NEAR(log_partition_function(s), 3 * 9 * std::log(1.3), 1e-9);
  }
}

TEST(BrickCorrelation, AbsorbingKernelMatchesEnumeration) {
  Rng rng = make_rng(12);
  std::uniform_real_distribution<double> d(0.3, 2.0);
  for (auto [M, N] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}})
    for (int r = 0; r < 5; ++r) {
      double z = d(rng), w = d(rng);
      BrickSpec s(M, N, z, w, kAbsorbing);
      double mean_L = 0, brute_L = 0;
      for (int x = 0; x <= N; ++x) {
        double r1 = dimer_correlation(s, {x});
        EXPECT_NEAR(r1, enumerated_correlation(M, N, z, w, {x}), 1e-10);
        mean_L += r1;
        for (int y = x + 1; y <= N; ++y)
          EXPECT_NEAR(dimer_correlation(s, {x, y}), enumerated_correlation(M, N, z, w, {x, y}), 1e-10);
      }
      BrickGraph g(M, N);
      double zsum = 0;
      for (const auto& c : enumerate_dimers(M, N)) {
        double wt = std::pow(z, c.horizontal) * std::pow(w, c.vertical);
        zsum += wt;
        brute_L += wt * cover_to_paths(g, c).heights.size();
      }
      EXPECT_NEAR(mean_L, brute_L / zsum, 1e-10);
    }
  // Pair correlation at (2,2), z = 1, w = 0.7.
  BrickSpec s(2, 2, 1, 0.7, kAbsorbing);
  EXPECT_NEAR(dimer_correlation(s, {0, 2}), enumerated_correlation(2, 2, 1, 0.7, {0, 2}), 1e-10);
  EXPECT_GT(std::abs(dimer_correlation(BrickSpec(2, 2, 1, 0.7, kPrinted), {1}) -
                     enumerated_correlation(2, 2, 1, 0.7, {1})),
            1e-3);
  EXPECT_THROW(dimer_correlation(s, {1, 1}), Error);
}

TEST(BrickFreeEnergy, LimitsAndMonotonicity) {
  EXPECT_NEAR(free_energy_limit(1.0, 0.3), 0.0, 1e-15);
  EXPECT_NEAR(free_energy_limit(2.0, 0.3), 0.5 * std::log(2.0), 1e-15);
  EXPECT_THROW(free_energy_limit(1.0, 0.5), Error);
  // Independent midpoint-rule value of (1/pi) int_0^{pi/3} log(2 cos s) ds.
  double q = 0;
  const int n = 200000;
  const double up = std::acos(0.5);
  for (int i = 0; i < n; ++i) q += std::log(2 * std::cos((i + 0.5) * up / n)) * up / n;
  EXPECT_NEAR(free_energy_limit(1.0, 1.0, kAbsorbing), q / std::numbers::pi, 1e-9);
  EXPECT_NEAR(free_energy_limit(1.0, 1.0, kPrinted), q / (2 * std::numbers::pi), 1e-9);
  // Finite size at (200, 400) follows the 1/pi prefactor.
  for (auto sp : {kPrinted, kAbsorbing}) {
    double f = free_energy(BrickSpec(200, 400, 1.0, 1.0, sp));
    EXPECT_NEAR(f, free_energy_limit(1.0, 1.0, kAbsorbing), 1e-2);
    EXPECT_GT(std::abs(f - free_energy_limit(1.0, 1.0, kPrinted)), 0.05);
    EXPECT_NEAR(free_energy(BrickSpec(200, 400, 1.0, 0.3, sp)), 0.0, 1e-2);
  }
  double prev = -1e300;
  for (double w = 0.1; w <= 2.0; w += 0.05) {
    double f = free_energy(BrickSpec(20, 40, 1.0, w, kAbsorbing));
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(BrickKernel, BulkSineKernel) {
  const double th = theta0(1.0, 1.0);
  EXPECT_NEAR(th, 2.0 / 3.0, 1e-15);
  for (auto sp : {kPrinted, kAbsorbing}) {
    auto K = dimer_kernel(BrickSpec(400, 800, 1.0, 1.0, sp));
    double worst = 0;
    for (int t = -4; t <= 4; ++t)
      for (int s = -4; s <= 4; ++s)
        worst = std::max(worst, std::abs(K(400 + t, 400 + s) - bulk_sine_kernel(th, t - s)));
    EXPECT_LT(worst, 0.01);
  }
}

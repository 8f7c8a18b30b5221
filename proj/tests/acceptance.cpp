// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include "tilings/brickdimer.hpp"
#include "tilings/cli.hpp"
#include "tilings/growth.hpp"
#include "tilings/hexagon.hpp"
#include "tilings/ope.hpp"
#include "tilings/schur.hpp"
#include "tilings/shuffling.hpp"
#include "tilings/stats.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace tilings;

namespace {

// Tolerances and sizes, pinned.
constexpr double kKernelTol = 1e-10;
constexpr double kSlopeRelTol = 0.20;
constexpr double kClosedFormTol = 1e-12;
constexpr double kSigmas = 4.0;
constexpr double kChiP = 1e-3;
constexpr double kDimerTol = 1e-10;
constexpr double kFreeEnergyTol = 1e-2;
constexpr double kSineTol = 0.01;
constexpr double kEdgeTol = 0.01;
constexpr double kArcticTol = 0.05;
constexpr double kExponentTarget = 2.0 / 3.0, kExponentTol = 0.15;
constexpr double kSkewTol = 0.2, kKurtTol = 0.3;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> info;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

std::string num(double x) { return cli::fmt(x); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void crit1(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  for (int n = 1; n <= 5; ++n) {
    BigInt count = enumerate_tilings(n, 1).size();
    BigInt expected = BigInt(1) << (n * (n + 1) / 2);
    o.check(count == expected, "n=" + std::to_string(n) + " count " + count.str());
  }
  double s = seconds_since(t0);
  o.check(s < 60, "runtime " + num(s) + " s");
}

void crit2(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  Rational worst = 0;
  int cases = 0;
  for (int n = 1; n <= 4; ++n)
    for (int w : {1, 2})
      for (int r = 1; r <= n; ++r) {
        worst = std::max(worst, zigzag_krawtchouk_tv(n, r, w));
        ++cases;
      }
  o.check(worst == 0, std::to_string(cases) + " laws, max TV " + worst.str());
  double s = seconds_since(t0);
  o.check(s < 300, "runtime " + num(s) + " s");
}

void crit3(Outcome& o) {
  {
    const int R = 100000;
    auto all = enumerate_tilings(2, 1);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i) index[cli::tiling_key(all[i].tiling)] = i;
    std::vector<long> counts(all.size(), 0);
    auto m = AztecMeasure::from_q(2, 0.5);
    for (int i = 0; i < R; ++i) {
      Rng rng = make_rng(kSeed, i);
      counts[index.at(cli::tiling_key(sample_aztec(m, rng)))]++;
    }
    auto chi = chi_square_test(counts, std::vector<double>(all.size(), 1.0 / all.size()));
    o.check(chi.p_value > kChiP, "n=2 uniform chi2 p=" + num(chi.p_value));
  }
  {
    const int R = 100000;
    auto law = vertical_count_law(3, 0.3);
    std::vector<long> counts(law.size(), 0);
    auto m = AztecMeasure::from_q(3, 0.3);
    for (int i = 0; i < R; ++i) {
      Rng rng = make_rng(kSeed + 1, i);
      counts[vertical_count(sample_aztec(m, rng)) / 2]++;
    }
    double worst = 0;
    for (std::size_t k = 0; k < law.size(); ++k) {
      double sd = std::sqrt(R * law[k] * (1 - law[k]));
      worst = std::max(worst, std::abs(counts[k] - R * law[k]) / sd);
    }
    o.check(worst < kSigmas, "n=3 q=0.3 vertical law max |z|=" + num(worst));
  }
}

void crit4(Outcome& o) {
  struct Case {
    DiscreteWeight w;
    int N;
    std::string name;
  };
  std::vector<Case> cases{
      {DiscreteWeight::krawtchouk(200, 0.3), 60, "Krawtchouk K=200 p=0.3 N=60"},
      {DiscreteWeight::krawtchouk(2000, 0.5), 1000, "Krawtchouk K=2000 p=0.5 N=1000"},
      {DiscreteWeight::krawtchouk(2000, 0.2), 300, "Krawtchouk K=2000 p=0.2 N=300"},
      {DiscreteWeight::hahn(500, 0, 0), 200, "Hahn N=500 (0,0) n=200"},
      {DiscreteWeight::hahn(500, 20, 5), 100, "Hahn N=500 (20,5) n=100"},
  };
  for (const auto& c : cases) {
    ProjectionKernel k(build_orthonormal(c.w, c.N));
    auto r = cli::check_kernel(k);
    o.check(r.trace_error < kKernelTol && r.reproducing_error < kKernelTol,
            c.name + " trace err " + num(r.trace_error) + " reproducing err " + num(r.reproducing_error));
  }
}

void crit5(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  auto v = cli::variance_scan(4000, 0.5, 0.5, 16, 1024);
  const double target = 1 / (std::numbers::pi * std::numbers::pi);
  o.check(std::abs(v.slope - target) < kSlopeRelTol * target,
          "slope " + num(v.slope) + " vs 1/pi^2 " + num(target));
  double s = seconds_since(t0);
  o.check(s < 600, "runtime " + num(s) + " s");
}

void crit6(Outcome& o) {
  double worst = 0;
  for (double q : {0.1, 0.2, 0.5, 0.9})
    for (int t = 0; t <= 30; ++t) worst = std::max(worst, std::abs(lpp_cdf_exact(1, 1, q, t) - (1 - std::pow(q, t + 1))));
  o.check(worst < kClosedFormTol, "M=N=1 closed form max err " + num(worst));
  const int R = 1000000;
  for (double q : {0.2, 0.5}) {
    std::vector<long> hist(64, 0);
    for (int i = 0; i < R; ++i) {
      Rng rng = make_rng(kSeed + 2 + static_cast<std::uint64_t>(q * 10), i);
      auto g = cli::sample_lpp(3, 3, q, rng);
      hist[std::min<std::int64_t>(g, 63)]++;
    }
    double zmax = 0;
    long cum = 0;
    for (int t = 0; t <= 12; ++t) {
      cum += hist[t];
      double exact = lpp_cdf_exact(3, 3, q, t), mc = double(cum) / R;
      double sd = std::sqrt(std::max(exact * (1 - exact), 1e-300) / R);
      zmax = std::max(zmax, std::abs(mc - exact) / sd);
    }
    o.check(zmax < kSigmas, "M=N=3 q=" + num(q) + " max |z|=" + num(zmax));
  }
}

void crit7(Outcome& o) {
  long roundtrip = 0, identity = 0;
  const int R = 10000;
  for (int i = 0; i < R; ++i) {
    Rng rng = make_rng(kSeed + 3, i);
    auto W = sample_weights(5, 5, 0.5, rng);
    auto r = cascade_grow(W);
    roundtrip += cascade_invert(r.final_state).w == W.w;
    identity += height_equals_lpp(W);
  }
  o.check(roundtrip == R, "round trip " + std::to_string(roundtrip) + "/" + std::to_string(R));
  o.check(identity == R, "height = last passage " + std::to_string(identity) + "/" + std::to_string(R));
  std::vector<double> a{0.4, 0.3}, b{0.4, 0.3};
  auto shapes = partitions_in_box(2, 14);
  std::map<Partition, std::size_t> index;
  std::vector<double> probs;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    index[shapes[i]] = i;
    probs.push_back(schur_measure_prob(shapes[i], a, b));
  }
  probs.push_back(std::max(0.0, 1 - std::accumulate(probs.begin(), probs.end(), 0.0)));
  std::vector<long> counts(probs.size(), 0);
  for (int i = 0; i < 100000; ++i) {
    Rng rng = make_rng(kSeed + 4, i);
    auto lam = cascade_grow(sample_schur_matrix(a, b, rng)).lambda;
    auto it = index.find(lam);
    counts[it == index.end() ? shapes.size() : it->second]++;
  }
  auto chi = chi_square_test(counts, probs);
  o.check(chi.p_value > kChiP, "shape chi2 p=" + num(chi.p_value));
}

void crit8(Outcome& o) {
  int enumerated = 0, lgv = 0;
  bool ok_enum = true, ok_lgv = true;
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b)
      for (int c = 1; c <= 6; ++c) {
        HexagonSpec h(a, b, c);
        BigInt n = macmahon(a, b, c);
        if (a <= 3 && b <= 3 && c <= 3) {
          ok_enum = ok_enum && BigInt(enumerate_hexagon(h).size()) == n;
          ++enumerated;
        }
        ok_lgv = ok_lgv && lgv_total(h, h.width() / 2) == n;
        ++lgv;
      }
  o.check(ok_enum, "enumeration equals MacMahon on " + std::to_string(enumerated) + " hexagons");
  o.check(ok_lgv, "LGV total equals MacMahon on " + std::to_string(lgv) + " hexagons");
  o.check(macmahon(2, 2, 2) == 20, "N(2,2,2) = " + macmahon(2, 2, 2).str());
}

void crit9(Outcome& o) {
  int columns = 0;
  bool ok = true;
  for (int n = 1; n <= 3; ++n) {
    HexagonSpec h(n, n, n);
    for (int m = 0; m <= 2 * n; ++m) {
      auto law = column_law(h, m);
      auto assoc = associated_hahn_particle_law(h, m, law);
      for (std::size_t i = 0; i < law.size(); ++i)
        ok = ok && law[i].prob == hahn_hole_prob(h, m, law[i].config.holes) && law[i].prob == assoc[i];
      ++columns;
    }
  }
  o.check(ok, "LGV = Hahn = associated Hahn on " + std::to_string(columns) + " columns");
}

struct DimerComparison {
  double z_err = 0, corr_err = 0;
};

DimerComparison compare_dimer(DimerSpectrum spectrum) {
  DimerComparison out;
  Rng rng = make_rng(kSeed + 5);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (auto [M, N] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}})
    for (int k = 0; k < 5; ++k) {
      double z = u(rng), w = u(rng);
      BrickSpec s(M, N, z, w, spectrum);
      double ze = enumerated_partition_function(M, N, z, w);
      out.z_err = std::max(out.z_err, std::abs(partition_function(s) - ze) / ze);
      for (int x = 0; x <= N; ++x) {
        out.corr_err = std::max(out.corr_err, std::abs(dimer_correlation(s, {x}) -
                                                        enumerated_correlation(M, N, z, w, {x})));
        for (int y = x + 1; y <= N; ++y)
          out.corr_err = std::max(out.corr_err, std::abs(dimer_correlation(s, {x, y}) -
                                                          enumerated_correlation(M, N, z, w, {x, y})));
      }
    }
  return out;
}

void crit10(Outcome& o) {
  auto printed = compare_dimer(DimerSpectrum::printed);
  o.check(printed.z_err < kDimerTol, "printed Z rel err " + num(printed.z_err));
  o.check(printed.corr_err < kDimerTol, "printed correlation err " + num(printed.corr_err));
  for (double w : {0.3, 1.0}) {
    double f = free_energy(BrickSpec(200, 400, 1, w));
    double l = free_energy_limit(1, w, DimerSpectrum::printed);
    o.check(std::abs(f - l) < kFreeEnergyTol, "w=" + num(w) + " f=" + num(f) + " printed limit " + num(l));
  }
  auto abs = compare_dimer(DimerSpectrum::absorbing);
  std::ostringstream info;
  info << "absorbing spectrum: Z rel err " << abs.z_err << ", correlation err " << abs.corr_err;
  for (double w : {0.3, 1.0}) {
    double f = free_energy(BrickSpec(200, 400, 1, w, DimerSpectrum::absorbing));
    double l = free_energy_limit(1, w, DimerSpectrum::absorbing);
    info << ", w=" << w << " |f - limit(1/pi)| " << std::abs(f - l);
  }
  bool abs_ok = abs.z_err < kDimerTol && abs.corr_err < kDimerTol;
  for (double w : {0.3, 1.0})
    abs_ok = abs_ok && std::abs(free_energy(BrickSpec(200, 400, 1, w, DimerSpectrum::absorbing)) -
                                free_energy_limit(1, w, DimerSpectrum::absorbing)) < kFreeEnergyTol;
  info << (abs_ok ? " (all within tolerance)" : " (out of tolerance)");
  o.info.push_back(info.str());
}

void crit11(Outcome& o) {
  ProjectionKernel k(build_orthonormal(DiscreteWeight::krawtchouk(2000, 0.5), 1000));
  double worst = 0;
  for (int d = -10; d <= 10; ++d) worst = std::max(worst, std::abs(k(1000, 1000 + d) - discrete_sine_kernel(d)));
  o.check(worst < kSineTol, "Krawtchouk K=2000 center max err " + num(worst));
  for (auto spectrum : {DimerSpectrum::printed, DimerSpectrum::absorbing}) {
    BrickSpec s(400, 800, 1, 1, spectrum);
    Eigen::MatrixXd K = dimer_kernel(s);
    const double th = theta0(1, 1);
    double err = 0;
    for (int d = -10; d <= 10; ++d) err = std::max(err, std::abs(K(400, 400 + d) - bulk_sine_kernel(th, d)));
    o.check(err < kSineTol, std::string("dimer M=400 N=800 ") +
                                (spectrum == DimerSpectrum::printed ? "printed" : "absorbing") +
                                " max err " + num(err));
  }
}

void crit12(Outcome& o) {
  const int K = 2000, R = 200;
  for (double t : {0.25, 0.5, 0.75}) {
    const int N = static_cast<int>(std::lround(t * K));
    ProjectionKernel k(build_orthonormal(DiscreteWeight::krawtchouk(K, 0.5), N));
    TopEdgeSampler edge(k, 500);
    MaxParticleSampler top(k, 500);
    double sum = 0, sum_max = 0;
    for (int i = 0; i < R; ++i) {
      Rng rng = make_rng(kSeed + 6, static_cast<std::uint64_t>(t * 100) * 1000 + i);
      sum += edge.sample(rng);
      sum_max += top.sample(rng);
    }
    double mean = sum / R / K, beta = krawtchouk_edge(t, 0.5);
    o.check(std::abs(mean - beta) < kEdgeTol, "t=" + num(t) + " edge/K " + num(mean) + " vs beta " + num(beta));
    o.info.push_back("t=" + num(t) + ": mean largest particle / K = " + num(sum_max / R / K) +
                     (t > 0.5 ? " (top sites packed; the edge is the largest hole)" : ""));
  }
  {
    HexagonSpec h(128, 128, 128);
    const int m = 84;
    std::vector<double> ys;
    for (int chain = 0; chain < 2; ++chain) {
      McmcSchedule sched{120000, 150, chain == 1};
      Rng rng = make_rng(kSeed + 7, chain);
      for (const auto& f : sample_hexagon_mcmc(h, 100, sched, rng))
        ys.push_back(upper_boundary_point(h, m, f.holes(m)));
    }
    double mean = sample_moments(ys).mean;
    double curve = arctic_curve(1.0, column_tau(h, m));
    o.check(std::abs(mean - curve) < kArcticTol, "hexagon c=128 tau=" + num(column_tau(h, m)) + " boundary " +
                                                     num(mean) + " vs curve " + num(curve));
  }
  {
    std::vector<double> lx, ly;
    for (int n : {64, 128, 256, 512}) {
      const int R2 = 2000;
      std::vector<double> g(R2);
      for (int i = 0; i < R2; ++i) {
        Rng rng = make_rng(kSeed + 8 + n, i);
        g[i] = static_cast<double>(cli::sample_lpp(n, n, 0.5, rng));
      }
      lx.push_back(std::log(double(n)));
      ly.push_back(std::log(sample_moments(g).variance));
    }
    double slope = fit_slope(lx, ly);
    o.check(std::abs(slope - kExponentTarget) < kExponentTol, "var G(N,N) exponent " + num(slope));
  }
}

void crit13(Outcome& o) {
  const int R = 1000000;
  const double alpha = 4;
  std::vector<long> hist(64, 0);
  for (int i = 0; i < R; ++i) {
    Rng rng = make_rng(kSeed + 9, i);
    hist[std::min(lis_sample(alpha, rng), 63)]++;
  }
  double zmax = 0;
  long cum = 0;
  for (int n = 0; n <= 12; ++n) {
    cum += hist[n];
    double f = lis_cdf(alpha, n), mc = double(cum) / R;
    double sd = std::sqrt(std::max(f * (1 - f), 1e-300) / R);
    zmax = std::max(zmax, std::abs(mc - f) / sd);
  }
  o.check(zmax < kSigmas, "alpha=4 n=0..12 max |z|=" + num(zmax));
}

void crit14(Outcome& o) {
  const int K = 1000, R = 10000;
  ProjectionKernel k(build_orthonormal(DiscreteWeight::krawtchouk(K, 0.5), K / 2));
  const int lo = K / 2 - K / 20, hi = lo + K / 10 - 1;
  Eigen::VectorXd lam = restricted_spectrum(k, lo, hi);
  auto exact = bernoulli_sum_cumulants(lam);
  std::vector<double> zs;
  for (int i = 0; i < R; ++i) {
    Rng rng = make_rng(kSeed + 10, i);
    int c = 0;
    for (Eigen::Index j = 0; j < lam.size(); ++j) c += uniform01(rng) < lam(j);
    zs.push_back((c - exact.mean) / std::sqrt(exact.variance));
  }
  auto m = sample_moments(zs);
  o.check(std::abs(m.skewness) < kSkewTol, "skewness " + num(m.skewness));
  o.check(std::abs(m.excess_kurtosis) < kKurtTol, "excess kurtosis " + num(m.excess_kurtosis));
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"exact tiling counts", crit1},
      {"zig-zag law equals Krawtchouk ensemble", crit2},
      {"shuffling law", crit3},
      {"kernel algebra", crit4},
      {"number-variance scaling", crit5},
      {"last-passage CDF", crit6},
      {"Schur cascade", crit7},
      {"MacMahon formula", crit8},
      {"hexagon column law", crit9},
      {"brick dimer formulas", crit10},
      {"bulk kernels", crit11},
      {"arctic boundaries", crit12},
      {"Poissonized LIS", crit13},
      {"CLT for interval counts", crit14},
  };
  // Optional arguments select criteria by number.
  std::vector<bool> run(criteria.size(), argc <= 1);
  for (int i = 1; i < argc; ++i) {
    int id = std::atoi(argv[i]);
    if (id >= 1 && id <= static_cast<int>(criteria.size())) run[id - 1] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!run[i]) continue;
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s(%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str(), seconds_since(t0));
    for (const auto& s : o.info) std::printf("  info: %s\n", s.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

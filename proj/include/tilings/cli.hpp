#pragma once

// Command-line front end shared by the `tilings` executable and the tests.

#include "tilings/brickdimer.hpp"
#include "tilings/common.hpp"
#include "tilings/growth.hpp"
#include "tilings/hexagon.hpp"
#include "tilings/lattice.hpp"
#include "tilings/ope.hpp"
#include "tilings/schur.hpp"
#include "tilings/shuffling.hpp"
#include "tilings/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace tilings::cli {

using nlohmann::json;

inline constexpr const char* kThreadsEnv = "TILINGS_THREADS";

inline int default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    try {
      int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(i) for i = 0..count-1 on up to `threads` workers. Callers write
// results by index, so output never depends on the schedule.
template <class F>
void parallel_for(long count, int threads, F&& f) {
  threads = static_cast<int>(std::clamp<long>(threads, 1, std::max(1L, count)));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < count; i += threads) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline Rng replica_rng(std::uint64_t seed, long index) { return make_rng(seed, static_cast<std::uint64_t>(index)); }

// ---------------------------------------------------------------------------
// Formatting

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

template <class T>
std::string join(const std::vector<T>& v, const char* sep) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? sep : "") << v[i];
  return s.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw Error("domain", "bad number '" + t + "'");
    }
  }
  return out;
}

inline std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double x : parse_doubles(s)) {
    require(x == std::floor(x), "domain", "expected integers in '" + s + "'");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

inline std::vector<Rational> parse_rationals(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_rational(t));
  return out;
}

// ---------------------------------------------------------------------------
// Command context

struct Context {
  CLI::App* sub = nullptr;
  std::ostream* out = nullptr;
  std::string out_path;
  int threads = 1;
  std::uint64_t seed = 0;
  long replicas = 1;

  // Every option of the subcommand except output plumbing, as parsed.
  json config() const {
    json j;
    j["command"] = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "out" || name == "threads" || name == "config") continue;
      if (opt->count() > 0)
        j[name] = join(opt->reduced_results(), ",");
      else
        j[name] = opt->get_default_str();
    }
    return j;
  }

  std::ostream& stream() const { return *out; }

  void csv_header(const std::vector<std::string>& columns) const {
    stream() << "# config: " << config().dump() << "\n" << join(columns, ",") << "\n";
  }
  void csv_row(const std::vector<std::string>& fields) const {
    std::vector<std::string> q;
    for (const auto& f : fields) q.push_back(csv_field(f));
    stream() << join(q, ",") << "\n";
  }
  void summary(const json& j) const { stream() << "# summary: " << j.dump() << "\n"; }
};

// ---------------------------------------------------------------------------
// Aztec diamond

inline std::string tiling_key(const Tiling& t) {
  std::vector<std::tuple<int, int, int>> d;
  for (const auto& x : t.dominoes) d.emplace_back(x.x, x.y, static_cast<int>(x.orientation));
  std::sort(d.begin(), d.end());
  std::string s;
  for (auto [x, y, o] : d) s += std::to_string(x) + ":" + std::to_string(y) + ":" + std::to_string(o) + ";";
  return s;
}

struct AztecArgs {
  int n = 2;
  std::string q = "0.5";
  std::string stat = "verticals";
  std::string w = "1,2";
};

inline void run_aztec_sample(const Context& ctx, const AztecArgs& a) {
  const double q = to_double(parse_rational(a.q));
  const auto measure = AztecMeasure::from_q(a.n, q);
  std::vector<Tiling> tilings(static_cast<std::size_t>(ctx.replicas));
  parallel_for(ctx.replicas, ctx.threads, [&](long i) {
    Rng rng = replica_rng(ctx.seed, i);
    tilings[i] = sample_aztec(measure, rng);
  });
  json j;
  j["config"] = ctx.config();
  j["tilings"] = json::array();
  for (const auto& t : tilings) j["tilings"].push_back(to_json(t));
  ctx.stream() << j.dump() << "\n";
}

inline void run_aztec_stats(const Context& ctx, const AztecArgs& a) {
  if (a.stat == "counts") {
    ctx.csv_header({"n", "count", "expected", "match"});
    bool all = true;
    for (int n = 1; n <= a.n; ++n) {
      BigInt count = enumerate_tilings(n, 1).size();
      BigInt expected = BigInt(1) << (n * (n + 1) / 2);
      all = all && count == expected;
      ctx.csv_row({std::to_string(n), count.str(), expected.str(), count == expected ? "1" : "0"});
    }
    ctx.summary({{"all_match", all}});
    return;
  }
  if (a.stat == "zigzag") {
    require(a.n <= 4, "refused", "exact zig-zag laws are enumerated only for n <= 4");
    ctx.csv_header({"n", "w", "r", "tv"});
    Rational worst = 0;
    for (int n = 1; n <= a.n; ++n)
      for (const auto& w : parse_rationals(a.w))
        for (int r = 1; r <= n; ++r) {
          Rational tv = zigzag_krawtchouk_tv(n, r, w);
          worst = std::max(worst, tv);
          ctx.csv_row({std::to_string(n), w.str(), std::to_string(r), tv.str()});
        }
    ctx.summary({{"max_tv", worst.str()}});
    return;
  }
  const Rational qr = parse_rational(a.q);
  const double q = to_double(qr);
  const auto measure = AztecMeasure::from_q(a.n, q);
  std::vector<Tiling> samples(static_cast<std::size_t>(ctx.replicas));
  parallel_for(ctx.replicas, ctx.threads, [&](long i) {
    Rng rng = replica_rng(ctx.seed, i);
    samples[i] = sample_aztec(measure, rng);
  });
  if (a.stat == "verticals") {
    auto law = vertical_count_law(a.n, q);
    std::vector<long> counts(law.size(), 0);
    for (const auto& t : samples) counts[vertical_count(t) / 2]++;
    ctx.csv_header({"verticals", "observed", "expected", "z"});
    double worst = 0;
    const double R = static_cast<double>(ctx.replicas);
    for (std::size_t k = 0; k < law.size(); ++k) {
      double e = R * law[k], sd = std::sqrt(R * law[k] * (1 - law[k]));
      double z = sd > 0 ? (counts[k] - e) / sd : 0.0;
      worst = std::max(worst, std::abs(z));
      ctx.csv_row({std::to_string(2 * k), std::to_string(counts[k]), fmt(e), fmt(z)});
    }
    ctx.summary({{"max_abs_z", worst}});
    return;
  }
  if (a.stat == "tilings") {
    auto all = enumerate_tilings(a.n, 1);
    const Rational ratio = qr / (1 - qr);
    std::map<std::string, std::size_t> index;
    std::vector<double> probs;
    Rational total = 0;
    std::vector<Rational> weights;
    for (std::size_t i = 0; i < all.size(); ++i) {
      index[tiling_key(all[i].tiling)] = i;
      weights.push_back(rational_pow(ratio, vertical_count(all[i].tiling) / 2));
      total += weights.back();
    }
    for (const auto& w : weights) probs.push_back(to_double(w / total));
    std::vector<long> counts(all.size(), 0);
    for (const auto& t : samples) {
      auto it = index.find(tiling_key(t));
      require(it != index.end(), "validation", "sampled tiling missing from the enumeration");
      counts[it->second]++;
    }
    ctx.csv_header({"tiling", "verticals", "observed", "expected"});
    for (std::size_t i = 0; i < all.size(); ++i)
      ctx.csv_row({std::to_string(i), std::to_string(vertical_count(all[i].tiling)),
                   std::to_string(counts[i]), fmt(probs[i] * ctx.replicas)});
    auto chi = chi_square_test(counts, probs);
    ctx.summary({{"chi2", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}});
    return;
  }
  throw Error("domain", "unknown statistic '" + a.stat + "' (counts, zigzag, verticals, tilings)");
}

// ---------------------------------------------------------------------------
// Orthogonal polynomial ensembles

struct OpeArgs {
  std::string family = "krawtchouk";
  std::string params = "100,0.5";
  int N = 50;
  bool check = false;
  std::string stat = "sample";
  int lo = -1, hi = -1;
  int window = 0;
  double t = 0.5, p = 0.5;
  int K = 4000, Lmin = 16, Lmax = 1024;
};

inline DiscreteWeight parse_family(const std::string& family, const std::string& params) {
  auto v = parse_doubles(params);
  if (family == "krawtchouk") {
    require(v.size() == 2, "domain", "krawtchouk params are K,p");
    return DiscreteWeight::krawtchouk(static_cast<int>(v[0]), v[1]);
  }
  require(v.size() == 3, "domain", family + " params are size,alpha,beta");
  if (family == "hahn") return DiscreteWeight::hahn(static_cast<int>(v[0]), v[1], v[2]);
  if (family == "associated-hahn") return DiscreteWeight::associated_hahn(static_cast<int>(v[0]), v[1], v[2]);
  throw Error("domain", "unknown family '" + family + "' (krawtchouk, hahn, associated-hahn)");
}

struct KernelCheck {
  double trace_error = 0, reproducing_error = 0;
};

inline KernelCheck check_kernel(const ProjectionKernel& k) {
  Eigen::MatrixXd K = k.dense();
  KernelCheck c;
  c.trace_error = std::abs(K.trace() - k.rank());
  c.reproducing_error = (K * K - K).cwiseAbs().maxCoeff();
  return c;
}

inline void run_ope_kernel(const Context& ctx, const OpeArgs& a) {
  auto weight = parse_family(a.family, a.params);
  ProjectionKernel k(build_orthonormal(weight, a.N));
  if (a.check) {
    auto c = check_kernel(k);
    ctx.csv_header({"family", "size", "N", "trace_error", "reproducing_error"});
    ctx.csv_row({a.family, std::to_string(weight.size), std::to_string(a.N), fmt(c.trace_error),
                 fmt(c.reproducing_error)});
    return;
  }
  Eigen::MatrixXd K = k.dense();
  std::vector<std::string> cols{"x"};
  for (Eigen::Index y = 0; y < K.cols(); ++y) cols.push_back("y" + std::to_string(y));
  ctx.csv_header(cols);
  for (Eigen::Index x = 0; x < K.rows(); ++x) {
    std::vector<std::string> row{std::to_string(x)};
    for (Eigen::Index y = 0; y < K.cols(); ++y) row.push_back(fmt(K(x, y)));
    ctx.csv_row(row);
  }
}

inline void run_ope_sample(const Context& ctx, const OpeArgs& a) {
  auto weight = parse_family(a.family, a.params);
  ProjectionKernel k(build_orthonormal(weight, a.N));
  const int S = k.support_size();
  const long R = ctx.replicas;
  if (a.stat == "sample") {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(R));
    parallel_for(R, ctx.threads, [&](long i) {
      Rng rng = replica_rng(ctx.seed, i);
      out[i] = sample_dpp(k, rng);
    });
    ctx.csv_header({"replica", "positions"});
    for (long i = 0; i < R; ++i) ctx.csv_row({std::to_string(i), join(out[i], " ")});
    return;
  }
  if (a.stat == "max" || a.stat == "edge") {
    const int window = a.window > 0 ? a.window : std::max(64, S / 4);
    MaxParticleSampler top(k, window);
    TopEdgeSampler edge(k, window);
    std::vector<double> xs(static_cast<std::size_t>(R));
    parallel_for(R, ctx.threads, [&](long i) {
      Rng rng = replica_rng(ctx.seed, i);
      xs[i] = a.stat == "max" ? top.sample(rng) : edge.sample(rng);
    });
    ctx.csv_header({"replica", a.stat});
    for (long i = 0; i < R; ++i) ctx.csv_row({std::to_string(i), fmt(xs[i])});
    auto m = sample_moments(xs);
    json s{{"mean", m.mean}, {"mean_over_size", m.mean / weight.size}, {"sd", std::sqrt(m.variance)}};
    if (weight.family == WeightFamily::krawtchouk)
      s["edge"] = krawtchouk_edge(double(a.N) / weight.size, weight.p);
    ctx.summary(s);
    return;
  }
  if (a.stat == "count") {
    // nu(I) is a sum of independent Bernoulli variables with the eigenvalues
    // of K restricted to I as parameters.
    const int lo = a.lo >= 0 ? a.lo : S / 2 - S / 20;
    const int hi = a.hi >= 0 ? a.hi : lo + S / 10 - 1;
    Eigen::VectorXd lam = restricted_spectrum(k, lo, hi);
    std::vector<double> xs(static_cast<std::size_t>(R));
    parallel_for(R, ctx.threads, [&](long i) {
      Rng rng = replica_rng(ctx.seed, i);
      int c = 0;
      for (Eigen::Index j = 0; j < lam.size(); ++j) c += uniform01(rng) < lam(j);
      xs[i] = c;
    });
    auto exact = bernoulli_sum_cumulants(lam);
    std::vector<double> zs;
    for (double x : xs) zs.push_back((x - exact.mean) / std::sqrt(exact.variance));
    auto m = sample_moments(zs);
    ctx.csv_header({"replica", "count", "normalized"});
    for (long i = 0; i < R; ++i) ctx.csv_row({std::to_string(i), fmt(xs[i]), fmt(zs[i])});
    ctx.summary({{"lo", lo},
                 {"hi", hi},
                 {"mean", exact.mean},
                 {"variance", exact.variance},
                 {"skewness", m.skewness},
                 {"excess_kurtosis", m.excess_kurtosis},
                 {"exact_skewness", exact.skewness},
                 {"exact_excess_kurtosis", exact.excess_kurtosis}});
    return;
  }
  throw Error("domain", "unknown statistic '" + a.stat + "' (sample, max, edge, count)");
}

struct VarianceScan {
  std::vector<int> L;
  std::vector<double> variance;
  double slope = 0;
};

// Central intervals of length L = Lmin, 2 Lmin, ..., Lmax.
inline VarianceScan variance_scan(int K, double t, double p, int Lmin, int Lmax) {
  require(Lmin >= 1 && Lmax >= Lmin && Lmax <= K + 1, "domain", "need 1 <= Lmin <= Lmax <= K+1");
  const int N = static_cast<int>(std::lround(t * K));
  ProjectionKernel k(build_orthonormal(DiscreteWeight::krawtchouk(K, p), N));
  VarianceScan out;
  std::vector<double> logs;
  for (long L = Lmin; L <= Lmax; L *= 2) {
    int lo = static_cast<int>((K + 1 - L) / 2);
    out.L.push_back(static_cast<int>(L));
    out.variance.push_back(number_variance(k, lo, lo + static_cast<int>(L) - 1));
    logs.push_back(std::log(double(L)));
  }
  out.slope = out.L.size() >= 2 ? fit_slope(logs, out.variance) : 0.0;
  return out;
}

inline void run_variance_scan(const Context& ctx, const OpeArgs& a) {
  auto v = variance_scan(a.K, a.t, a.p, a.Lmin, a.Lmax);
  ctx.csv_header({"L", "variance"});
  for (std::size_t i = 0; i < v.L.size(); ++i) ctx.csv_row({std::to_string(v.L[i]), fmt(v.variance[i])});
  ctx.summary({{"slope", v.slope}, {"target", 1 / (std::numbers::pi * std::numbers::pi)}});
}

// ---------------------------------------------------------------------------
// Growth

struct GrowthArgs {
  int M = 3, N = 3;
  double q = 0.5;
  std::string sizes;
  int tmax = 12;
  double alpha = 4;
  int n = 12;
};

inline std::int64_t sample_lpp(int M, int N, double q, Rng& rng) {
  auto G = lpp_value(sample_weights(M, N, q, rng));
  return M > 0 && N > 0 ? G(M, N) : 0;
}

inline void run_growth_sim(const Context& ctx, const GrowthArgs& a) {
  if (a.sizes.empty()) {
    std::vector<std::int64_t> g(static_cast<std::size_t>(ctx.replicas));
    parallel_for(ctx.replicas, ctx.threads, [&](long i) {
      Rng rng = replica_rng(ctx.seed, i);
      g[i] = sample_lpp(a.M, a.N, a.q, rng);
    });
    ctx.csv_header({"replica", "G"});
    for (long i = 0; i < ctx.replicas; ++i) ctx.csv_row({std::to_string(i), std::to_string(g[i])});
    return;
  }
  // Variance of G(N, N) across sizes and its log-log slope.
  auto sizes = parse_ints(a.sizes);
  ctx.csv_header({"N", "mean", "variance"});
  std::vector<double> lx, ly;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const int n = sizes[s];
    const std::uint64_t sub = split_seed(ctx.seed, s);
    std::vector<double> g(static_cast<std::size_t>(ctx.replicas));
    parallel_for(ctx.replicas, ctx.threads, [&](long i) {
      Rng rng = replica_rng(sub, i);
      g[i] = static_cast<double>(sample_lpp(n, n, a.q, rng));
    });
    auto m = sample_moments(g);
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(m.variance));
    ctx.csv_row({std::to_string(n), fmt(m.mean), fmt(m.variance)});
  }
  ctx.summary({{"variance_exponent", lx.size() >= 2 ? fit_slope(lx, ly) : 0.0}});
}

inline void run_growth_cdf(const Context& ctx, const GrowthArgs& a) {
  require(a.tmax >= 0, "domain", "tmax must be nonnegative");
  std::vector<std::int64_t> g(static_cast<std::size_t>(ctx.replicas));
  parallel_for(ctx.replicas, ctx.threads, [&](long i) {
    Rng rng = replica_rng(ctx.seed, i);
    g[i] = sample_lpp(a.M, a.N, a.q, rng);
  });
  ctx.csv_header({"t", "exact", "closed_form", "montecarlo", "z"});
  const double R = static_cast<double>(ctx.replicas);
  double worst_z = 0, worst_closed = 0;
  for (int t = 0; t <= a.tmax; ++t) {
    double exact = lpp_cdf_exact(a.M, a.N, a.q, t);
    long hits = std::count_if(g.begin(), g.end(), [&](std::int64_t v) { return v <= t; });
    double mc = hits / R;
    double sd = std::sqrt(std::max(exact * (1 - exact), 1e-300) / R);
    double z = (mc - exact) / sd;
    worst_z = std::max(worst_z, std::abs(z));
    std::string closed;
    if (a.M == 1 && a.N == 1) {
      double c = 1 - std::pow(a.q, t + 1);
      worst_closed = std::max(worst_closed, std::abs(c - exact));
      closed = fmt(c);
    }
    ctx.csv_row({std::to_string(t), fmt(exact), closed, fmt(mc), fmt(z)});
  }
  json s{{"max_abs_z", worst_z}};
  if (a.M == 1 && a.N == 1) s["max_closed_form_error"] = worst_closed;
  ctx.summary(s);
}

inline void run_lis_check(const Context& ctx, const GrowthArgs& a) {
  std::vector<int> len(static_cast<std::size_t>(ctx.replicas));
  parallel_for(ctx.replicas, ctx.threads, [&](long i) {
    Rng rng = replica_rng(ctx.seed, i);
    len[i] = lis_sample(a.alpha, rng);
  });
  ctx.csv_header({"n", "fredholm", "montecarlo", "z"});
  const double R = static_cast<double>(ctx.replicas);
  double worst = 0;
  for (int n = 0; n <= a.n; ++n) {
    double f = lis_cdf(a.alpha, n);
    double mc = std::count_if(len.begin(), len.end(), [&](int v) { return v <= n; }) / R;
    double sd = std::sqrt(std::max(f * (1 - f), 1e-300) / R);
    double z = (mc - f) / sd;
    worst = std::max(worst, std::abs(z));
    ctx.csv_row({std::to_string(n), fmt(f), fmt(mc), fmt(z)});
  }
  ctx.summary({{"max_abs_z", worst}});
}

// ---------------------------------------------------------------------------
// Schur measure

struct SchurArgs {
  int n = 2;
  std::string a = "0.4,0.3", b = "0.4,0.3";
  std::string lambda = "1";
  int cap = 12;
  bool exact = false;
};

inline void run_schur_rsk(const Context& ctx, const SchurArgs& s) {
  auto a = parse_doubles(s.a), b = parse_doubles(s.b);
  require(static_cast<int>(a.size()) == s.n && static_cast<int>(b.size()) == s.n, "domain",
          "a and b need n entries each");
  struct Outcome {
    Partition lambda;
    bool roundtrip = false, lpp = false;
  };
  std::vector<Outcome> res(static_cast<std::size_t>(ctx.replicas));
  parallel_for(ctx.replicas, ctx.threads, [&](long i) {
    Rng rng = replica_rng(ctx.seed, i);
    auto W = sample_schur_matrix(a, b, rng);
    auto r = cascade_grow(W);
    res[i] = {r.lambda, cascade_invert(r.final_state).w == W.w, height_equals_lpp(W)};
  });
  auto shapes = partitions_in_box(s.n, s.cap);
  std::map<Partition, std::size_t> index;
  std::vector<double> probs;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    index[shapes[i]] = i;
    probs.push_back(schur_measure_prob(shapes[i], a, b));
  }
  probs.push_back(std::max(0.0, 1 - std::accumulate(probs.begin(), probs.end(), 0.0)));
  std::vector<long> counts(probs.size(), 0);
  long roundtrip_fail = 0, lpp_fail = 0;
  for (const auto& o : res) {
    auto it = index.find(o.lambda);
    counts[it == index.end() ? shapes.size() : it->second]++;
    roundtrip_fail += !o.roundtrip;
    lpp_fail += !o.lpp;
  }
  ctx.csv_header({"lambda", "count", "expected"});
  const double R = static_cast<double>(ctx.replicas);
  for (std::size_t i = 0; i < shapes.size(); ++i)
    if (counts[i] > 0 || probs[i] * R >= 0.5)
      ctx.csv_row({join(shapes[i], ","), std::to_string(counts[i]), fmt(probs[i] * R)});
  ctx.csv_row({"other", std::to_string(counts.back()), fmt(probs.back() * R)});
  auto chi = chi_square_test(counts, probs);
  ctx.summary({{"roundtrip_failures", roundtrip_fail},
               {"height_lpp_failures", lpp_fail},
               {"chi2", chi.statistic},
               {"dof", chi.dof},
               {"p_value", chi.p_value}});
}

inline void run_schur_prob(const Context& ctx, const SchurArgs& s) {
  Partition lambda = parse_ints(s.lambda);
  if (s.exact) {
    ctx.stream() << schur_measure_prob(lambda, parse_rationals(s.a), parse_rationals(s.b)).str() << "\n";
    return;
  }
  ctx.stream() << fmt(schur_measure_prob(lambda, parse_doubles(s.a), parse_doubles(s.b))) << "\n";
}

// ---------------------------------------------------------------------------
// Hexagon

struct HexagonArgs {
  int a = 2, b = 2, c = 2;
  int m = 1;
  std::string method = "formula";
  int chains = 1;
  long burn_in = -1;
  long sweeps = 100;
  std::string stat = "holes";
};

inline void run_hexagon_count(const Context& ctx, const HexagonArgs& h) {
  HexagonSpec spec(h.a, h.b, h.c);
  BigInt n;
  if (h.method == "formula")
    n = macmahon(h.a, h.b, h.c);
  else if (h.method == "lgv")
    n = lgv_total(spec, spec.width() / 2);
  else if (h.method == "enumerate")
    n = enumerate_hexagon(spec).size();
  else
    throw Error("domain", "unknown method '" + h.method + "' (formula, lgv, enumerate)");
  ctx.stream() << n.str() << "\n";
}

inline void run_hexagon_law(const Context& ctx, const HexagonArgs& h) {
  HexagonSpec spec(h.a, h.b, h.c);
  require(h.m >= 0 && h.m <= spec.width(), "domain", "column m must lie in 0..a+b");
  auto law = column_law(spec, h.m);
  auto assoc = associated_hahn_particle_law(spec, h.m, law);
  ctx.csv_header({"holes", "particles", "lgv", "hahn", "associated_hahn", "match"});
  bool all = true;
  for (std::size_t i = 0; i < law.size(); ++i) {
    const auto& e = law[i];
    Rational hahn = hahn_hole_prob(spec, h.m, e.config.holes);
    bool ok = hahn == e.prob && assoc[i] == e.prob;
    all = all && ok;
    ctx.csv_row({join(e.config.holes, " "), join(e.config.particles, " "), e.prob.str(), hahn.str(),
                 assoc[i].str(), ok ? "1" : "0"});
  }
  ctx.summary({{"exact_match", all}});
}

inline void run_hexagon_sample(const Context& ctx, const HexagonArgs& h) {
  HexagonSpec spec(h.a, h.b, h.c);
  const int chains = std::max(1, h.chains);
  const long samples = ctx.replicas;
  require(samples >= 1, "domain", "replicas must be positive");
  std::vector<WalkFamily> fams;
  std::vector<std::vector<int>> column_holes;
  if (h.method == "exact") {
    fams.resize(static_cast<std::size_t>(samples));
    parallel_for(samples, ctx.threads, [&](long i) {
      Rng rng = replica_rng(ctx.seed, i);
      fams[i] = sample_hexagon_exact(spec, rng);
    });
  } else if (h.method == "mcmc") {
    // Chain i starts from the lowest tiling when i is even, the highest otherwise.
    std::vector<std::vector<WalkFamily>> per(static_cast<std::size_t>(chains));
    parallel_for(chains, ctx.threads, [&](long i) {
      int count = static_cast<int>(samples / chains + (i < samples % chains ? 1 : 0));
      McmcSchedule sched{h.burn_in, h.sweeps, i % 2 == 1};
      Rng rng = replica_rng(ctx.seed, i);
      per[i] = sample_hexagon_mcmc(spec, count, sched, rng);
    });
    for (auto& p : per) fams.insert(fams.end(), p.begin(), p.end());
  } else if (h.method == "column") {
    require(h.stat == "arctic" || h.stat == "column", "domain", "the column method samples one column only");
    ColumnSampler sampler(spec, h.m);
    column_holes.resize(static_cast<std::size_t>(samples));
    parallel_for(samples, ctx.threads, [&](long i) {
      Rng rng = replica_rng(ctx.seed, i);
      column_holes[i] = sampler.sample_holes(rng);
    });
  } else {
    throw Error("domain", "unknown method '" + h.method + "' (exact, mcmc, column)");
  }
  if (column_holes.empty())
    for (const auto& f : fams) column_holes.push_back(f.holes(h.m));

  if (h.stat == "holes") {
    json j;
    j["config"] = ctx.config();
    j["samples"] = json::array();
    for (const auto& f : fams) {
      json cols = json::array();
      for (int m = 0; m <= spec.width(); ++m) cols.push_back(f.holes(m));
      j["samples"].push_back(cols);
    }
    ctx.stream() << j.dump() << "\n";
    return;
  }
  if (h.stat == "column") {
    ctx.csv_header({"sample", "holes"});
    for (std::size_t i = 0; i < column_holes.size(); ++i)
      ctx.csv_row({std::to_string(i), join(column_holes[i], " ")});
    return;
  }
  if (h.stat == "arctic") {
    const double lambda = double(h.a) / h.c, tau = column_tau(spec, h.m);
    const double curve = arctic_curve(lambda, tau);
    std::vector<double> ys;
    ctx.csv_header({"sample", "y", "curve"});
    for (std::size_t i = 0; i < column_holes.size(); ++i) {
      ys.push_back(upper_boundary_point(spec, h.m, column_holes[i]));
      ctx.csv_row({std::to_string(i), fmt(ys.back()), fmt(curve)});
    }
    auto mo = sample_moments(ys);
    ctx.summary({{"tau", tau}, {"mean", mo.mean}, {"curve", curve}, {"error", std::abs(mo.mean - curve)}});
    return;
  }
  throw Error("domain", "unknown statistic '" + h.stat + "' (holes, column, arctic)");
}

// ---------------------------------------------------------------------------
// Brick dimer

struct DimerArgs {
  int M = 1, N = 1;
  double z = 1, w = 1;
  std::string spectrum = "printed";
  std::string method = "formula";
  std::string points;
  int bulk = 0;
  std::string scan_w = "0.1:2.0:0.05";
};

inline void run_dimer_z(const Context& ctx, const DimerArgs& d) {
  BrickSpec s(d.M, d.N, d.z, d.w, parse_spectrum(d.spectrum));
  if (d.method == "enumerate")
    ctx.stream() << fmt(enumerated_partition_function(d.M, d.N, d.z, d.w)) << "\n";
  else if (d.method == "formula")
    ctx.stream() << fmt(partition_function(s)) << "\n";
  else
    throw Error("domain", "unknown method '" + d.method + "' (formula, enumerate)");
}

inline void run_dimer_corr(const Context& ctx, const DimerArgs& d) {
  BrickSpec s(d.M, d.N, d.z, d.w, parse_spectrum(d.spectrum));
  if (d.bulk > 0) {
    // Kernel along the center row against the sine kernel with density theta0.
    Eigen::MatrixXd K = dimer_kernel(s);
    const int x0 = d.N / 2;
    const double th = theta0(d.z, d.w);
    ctx.csv_header({"d", "kernel", "sine", "error"});
    double worst = 0;
    for (int k = -d.bulk; k <= d.bulk; ++k) {
      require(x0 + k >= 0 && x0 + k <= d.N, "domain", "bulk range leaves 0..N");
      double v = K(x0, x0 + k), e = bulk_sine_kernel(th, k);
      worst = std::max(worst, std::abs(v - e));
      ctx.csv_row({std::to_string(k), fmt(v), fmt(e), fmt(std::abs(v - e))});
    }
    ctx.summary({{"max_error", worst}});
    return;
  }
  auto pts = parse_ints(d.points);
  require(!pts.empty(), "domain", "give --points or --bulk");
  std::vector<std::string> cols{"points", "correlation"};
  const bool enumerate = d.method == "enumerate";
  if (enumerate) cols.push_back("enumerated");
  ctx.csv_header(cols);
  std::vector<std::string> row{join(pts, " "), fmt(dimer_correlation(s, pts))};
  if (enumerate) row.push_back(fmt(enumerated_correlation(d.M, d.N, d.z, d.w, pts)));
  ctx.csv_row(row);
}

inline void run_dimer_free_energy(const Context& ctx, const DimerArgs& d) {
  std::vector<double> range;
  for (const auto& t : split(d.scan_w, ':')) range.push_back(parse_doubles(t).at(0));
  if (range.size() == 1) range = {range[0], range[0], 1};
  require(range.size() == 3 && range[2] > 0 && range[1] >= range[0], "domain", "--scan-w is lo:hi:step");
  const auto spec = parse_spectrum(d.spectrum);
  ctx.csv_header({"w", "finite", "limit", "error"});
  double worst = 0;
  const long steps = std::lround(std::floor((range[1] - range[0]) / range[2] + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    double w = range[0] + i * range[2];
    double f = free_energy(BrickSpec(d.M, d.N, d.z, w, spec));
    std::string lim, err;
    if (std::abs(w / d.z - 0.5) > 1e-12) {
      double l = free_energy_limit(d.z, w, spec);
      worst = std::max(worst, std::abs(f - l));
      lim = fmt(l);
      err = fmt(std::abs(f - l));
    }
    ctx.csv_row({fmt(w), fmt(f), lim, err});
  }
  ctx.summary({{"max_error", worst}});
}

// ---------------------------------------------------------------------------
// Entry point

// Appends `--key=value` for every entry of the JSON config so that its
// values win over earlier flags (all options keep the last value).
inline void apply_config_file(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      require(i + 1 < args.size(), "usage", "--config needs a file");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return;
  std::ifstream in(path);
  require(static_cast<bool>(in), "io", "cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("usage", "config " + path + " is not valid JSON: " + e.what());
  }
  require(j.is_object(), "usage", "config must be a JSON object");
  if (j.contains("command")) {
    std::string cmd = j["command"].get<std::string>();
    if (args.empty() || args[0].rfind("-", 0) == 0) args.insert(args.begin(), cmd);
    require(args[0] == cmd, "usage", "config command '" + cmd + "' differs from '" + args[0] + "'");
  }
  for (auto& [key, value] : j.items()) {
    if (key == "command") continue;
    std::string v;
    if (value.is_string())
      v = value.get<std::string>();
    else if (value.is_array()) {
      std::vector<std::string> parts;
      for (auto& x : value) parts.push_back(x.is_string() ? x.get<std::string>() : x.dump());
      v = join(parts, ",");
    } else
      v = value.dump();
    args.push_back("--" + key + "=" + v);
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exactly solvable random tilings and growth models"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  std::string out_path;
  int threads = default_threads();
  std::uint64_t seed = 1;
  long replicas = 1;
  AztecArgs az;
  OpeArgs ope;
  GrowthArgs gr;
  SchurArgs sc;
  HexagonArgs hx;
  DimerArgs dm;
  std::map<std::string, std::function<void(const Context&)>> handlers;

  auto add = [&](const std::string& name, const std::string& desc, bool stochastic,
                 std::function<void(const Context&)> fn) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--threads", threads, std::string("worker cap (default $") + kThreadsEnv + ")")
        ->check(CLI::PositiveNumber);
    if (stochastic) {
      sub->add_option("--seed", seed, "64-bit master seed");
      sub->add_option("--replicas", replicas, "number of replicas")->check(CLI::NonNegativeNumber);
    }
    handlers[name] = std::move(fn);
    return sub;
  };

  {
    auto* s = add("aztec-sample", "shuffling samples as JSON tilings", true,
                  [&](const Context& c) { run_aztec_sample(c, az); });
    s->add_option("--n", az.n, "order")->check(CLI::NonNegativeNumber);
    s->add_option("--q", az.q, "q = w^2/(1+w^2)");
    s = add("aztec-stats", "tiling counts, exact zig-zag laws, sampled laws", true,
            [&](const Context& c) { run_aztec_stats(c, az); });
    s->add_option("--n", az.n, "order")->check(CLI::NonNegativeNumber);
    s->add_option("--q", az.q, "q = w^2/(1+w^2), decimal or fraction");
    s->add_option("--w", az.w, "comma list of rational weights (zigzag)");
    s->add_option("--stat", az.stat, "counts | zigzag | verticals | tilings");
  }
  {
    auto family = [&](CLI::App* s) {
      s->add_option("--family", ope.family, "krawtchouk | hahn | associated-hahn");
      s->add_option("--params", ope.params, "K,p or size,alpha,beta");
      s->add_option("--N", ope.N, "number of particles")->check(CLI::PositiveNumber);
    };
    auto* s = add("ope-kernel", "Christoffel-Darboux kernel as dense CSV", false,
                  [&](const Context& c) { run_ope_kernel(c, ope); });
    family(s);
    s->add_flag("--check", ope.check, "report trace and reproducing errors instead");
    s = add("ope-sample", "projection DPP samples and statistics", true,
            [&](const Context& c) { run_ope_sample(c, ope); });
    family(s);
    s->add_option("--stat", ope.stat, "sample | max | edge | count");
    s->add_option("--lo", ope.lo, "interval start (count)");
    s->add_option("--hi", ope.hi, "interval end (count)");
    s->add_option("--window", ope.window, "top window for the max and edge samplers");
    s = add("variance-scan", "number variance of central intervals", false,
            [&](const Context& c) { run_variance_scan(c, ope); });
    s->add_option("--K", ope.K, "Krawtchouk window")->check(CLI::PositiveNumber);
    s->add_option("--t", ope.t, "particles per site");
    s->add_option("--p", ope.p, "Krawtchouk parameter");
    s->add_option("--Lmin", ope.Lmin, "smallest interval");
    s->add_option("--Lmax", ope.Lmax, "largest interval");
  }
  {
    auto* s = add("growth-sim", "last-passage times G(M,N)", true,
                  [&](const Context& c) { run_growth_sim(c, gr); });
    s->add_option("--M", gr.M)->check(CLI::NonNegativeNumber);
    s->add_option("--N", gr.N)->check(CLI::NonNegativeNumber);
    s->add_option("--q", gr.q, "geometric parameter");
    s->add_option("--sizes", gr.sizes, "comma list of N for the variance scan of G(N,N)");
    s = add("growth-cdf", "exact and Monte Carlo CDF of G(M,N)", true,
            [&](const Context& c) { run_growth_cdf(c, gr); });
    s->add_option("--M", gr.M)->check(CLI::NonNegativeNumber);
    s->add_option("--N", gr.N)->check(CLI::NonNegativeNumber);
    s->add_option("--q", gr.q, "geometric parameter");
    s->add_option("--tmax", gr.tmax);
    s = add("lis-check", "Poissonized LIS: Fredholm CDF against simulation", true,
            [&](const Context& c) { run_lis_check(c, gr); });
    s->add_option("--alpha", gr.alpha);
    s->add_option("--n", gr.n, "largest n");
  }
  {
    auto* s = add("schur-rsk", "cascade shapes from random matrices", true,
                  [&](const Context& c) { run_schur_rsk(c, sc); });
    s->add_option("--n", sc.n)->check(CLI::PositiveNumber);
    s->add_option("--a", sc.a, "comma list");
    s->add_option("--b", sc.b, "comma list");
    s->add_option("--cap", sc.cap, "largest part tabulated in the chi-square");
    s = add("schur-prob", "Schur measure probability", false,
            [&](const Context& c) { run_schur_prob(c, sc); });
    s->add_option("--lambda", sc.lambda, "comma list of parts");
    s->add_option("--a", sc.a, "comma list");
    s->add_option("--b", sc.b, "comma list");
    s->add_flag("--exact", sc.exact, "rational arithmetic");
  }
  {
    auto dims = [&](CLI::App* s) {
      s->add_option("--a", hx.a)->check(CLI::PositiveNumber);
      s->add_option("--b", hx.b)->check(CLI::PositiveNumber);
      s->add_option("--c", hx.c)->check(CLI::PositiveNumber);
    };
    auto* s = add("hexagon-count", "number of lozenge tilings", false,
                  [&](const Context& c) { run_hexagon_count(c, hx); });
    dims(s);
    s->add_option("--method", hx.method, "formula | lgv | enumerate");
    s = add("hexagon-law", "exact column law against the Hahn ensembles", false,
            [&](const Context& c) { run_hexagon_law(c, hx); });
    dims(s);
    s->add_option("--m", hx.m, "column");
    s = add("hexagon-sample", "lozenge tilings as per-column hole lists", true,
            [&](const Context& c) { run_hexagon_sample(c, hx); });
    dims(s);
    s->add_option("--method", hx.method, "exact | mcmc | column");
    s->add_option("--chains", hx.chains, "independent MCMC chains");
    s->add_option("--burn-in", hx.burn_in, "burn-in sweeps (negative: default)");
    s->add_option("--sweeps", hx.sweeps, "sweeps between samples");
    s->add_option("--m", hx.m, "column for column statistics");
    s->add_option("--stat", hx.stat, "holes | column | arctic");
  }
  {
    auto params = [&](CLI::App* s) {
      s->add_option("--M", dm.M)->check(CLI::PositiveNumber);
      s->add_option("--N", dm.N)->check(CLI::PositiveNumber);
      s->add_option("--z", dm.z);
      s->add_option("--spectrum", dm.spectrum, "printed | absorbing");
    };
    auto* s = add("dimer-z", "brick-lattice partition function", false,
                  [&](const Context& c) { run_dimer_z(c, dm); });
    params(s);
    s->add_option("--w", dm.w);
    s->add_option("--method", dm.method, "formula | enumerate");
    s = add("dimer-corr", "correlation functions of the walk positions", false,
            [&](const Context& c) { run_dimer_corr(c, dm); });
    params(s);
    s->add_option("--w", dm.w);
    s->add_option("--points", dm.points, "comma list of heights");
    s->add_option("--bulk", dm.bulk, "compare the center kernel with the sine kernel up to this distance");
    s->add_option("--method", dm.method, "formula | enumerate");
    s = add("dimer-free-energy", "finite-size free energy against the limit", false,
            [&](const Context& c) { run_dimer_free_energy(c, dm); });
    params(s);
    s->add_option("--scan-w", dm.scan_w, "lo:hi:step");
  }

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    apply_config_file(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: usage: " << msg << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.sub = sub;
  ctx.threads = threads;
  ctx.seed = seed;
  ctx.replicas = replicas;
  ctx.out_path = out_path;
  std::ostringstream buffer;
  ctx.out = &buffer;
  try {
    handlers.at(sub->get_name())(ctx);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::bad_alloc&) {
    err << "error: resource: out of memory\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  if (out_path.empty() || out_path == "-") {
    out << buffer.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << buffer.str();
    if (!f) {
      err << "error: io: cannot write " << out_path << "\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace tilings::cli

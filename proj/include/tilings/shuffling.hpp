#pragma once

// Domino shuffling sampler and exact weighted enumeration for A_n.

#include "tilings/lattice.hpp"
#include "tilings/ope.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace tilings {

struct AztecMeasure {
  int n = 1;
  double w = 1.0;
  double q() const { return w * w / (1.0 + w * w); }
  static AztecMeasure from_q(int n, double q) {
    require(q > 0 && q < 1, "domain", "q must lie in (0,1)");
    return {n, std::sqrt(q / (1.0 - q))};
  }
};

namespace detail {

// One shuffle step A_k -> A_{k+1}: destroy bad pairs, slide, fill blocks.
// Blocks are found in a top-to-bottom, left-to-right scan of A_{k+1}.
inline Tiling shuffle_step(const Tiling& t, double q, Rng& rng) {
  const int k = t.order;
  std::vector<Kind> kinds(t.dominoes.size());
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) kinds[i] = classify_domino(t.dominoes[i], k);
  std::vector<char> dead(t.dominoes.size(), 0);
  if (k > 0) {
    CoverGrid grid(k);
    for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
      grid.at(t.dominoes[i].first()) = static_cast<int>(i);
      grid.at(t.dominoes[i].second()) = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
      const Domino& d = t.dominoes[i];
      if (kinds[i] == Kind::N) {
        int j = grid.get({d.x, d.y + 1});
        if (j >= 0 && t.dominoes[j] == Domino{d.x, d.y + 1, Orientation::horizontal} &&
            kinds[j] == Kind::S)
          dead[i] = dead[j] = 1;
      } else if (kinds[i] == Kind::E) {
        int j = grid.get({d.x + 1, d.y});
        if (j >= 0 && t.dominoes[j] == Domino{d.x + 1, d.y, Orientation::vertical} &&
            kinds[j] == Kind::W)
          dead[i] = dead[j] = 1;
      }
    }
  }
  Tiling next{k + 1, {}};
  next.dominoes.reserve(static_cast<std::size_t>((k + 1) * (k + 2)));
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    if (dead[i]) continue;
    Domino d = t.dominoes[i];
    switch (kinds[i]) {
      case Kind::N: ++d.y; break;
      case Kind::S: --d.y; break;
      case Kind::W: --d.x; break;
      case Kind::E: ++d.x; break;
    }
    next.dominoes.push_back(d);
  }
  AztecDiamond ad(k + 1);
  CoverGrid grid(k + 1);
  for (std::size_t i = 0; i < next.dominoes.size(); ++i) {
    for (Square s : {next.dominoes[i].first(), next.dominoes[i].second()}) {
      if (!ad.contains(s) || grid.get(s) != -1)
        throw Error("internal", "shuffle slide produced an overlap");
      grid.at(s) = static_cast<int>(i);
    }
  }
  std::bernoulli_distribution vertical(q);
  for (int l = k; l >= -(k + 1); --l) {
    for (int m = ad.row_begin(l); m < ad.row_end(l); ++m) {
      if (grid.get({m, l}) != -1) continue;
      Square block[4] = {{m, l}, {m + 1, l}, {m, l - 1}, {m + 1, l - 1}};
      for (Square s : block)
        if (!ad.contains(s) || grid.get(s) != -1)
          throw Error("internal", "shuffle left a hole that is not a 2x2 block");
      Domino a, b;
      if (vertical(rng)) {
        a = {m, l - 1, Orientation::vertical};
        b = {m + 1, l - 1, Orientation::vertical};
      } else {
        a = {m, l, Orientation::horizontal};
        b = {m, l - 1, Orientation::horizontal};
      }
      for (Domino d : {a, b}) {
        grid.at(d.first()) = grid.at(d.second()) = static_cast<int>(next.dominoes.size());
        next.dominoes.push_back(d);
      }
    }
  }
  return next;
}

}  // namespace detail

// Exact sample of P[tiling] proportional to w^{#vertical}. `on_stage` sees
// every intermediate tiling of A_1, ..., A_n.
inline Tiling sample_aztec(const AztecMeasure& m, Rng& rng,
                           const std::function<void(const Tiling&)>& on_stage = {}) {
  require(m.n >= 0, "domain", "order must be nonnegative");
  require(m.w > 0 && std::isfinite(m.w), "domain", "w must be positive");
  const double q = m.q();
  Tiling t{0, {}};
  for (int k = 0; k < m.n; ++k) {
    t = detail::shuffle_step(t, q, rng);
    if (on_stage) on_stage(t);
  }
  return t;
}

struct WeightedTiling {
  Tiling tiling;
  Rational weight;
};

inline constexpr int kMaxEnumerationOrder = 5;

inline std::vector<WeightedTiling> enumerate_tilings(int n, const Rational& w) {
  require(n >= 0, "domain", "order must be nonnegative");
  if (n > kMaxEnumerationOrder) {
    throw Error("infeasible", "enumeration of A_" + std::to_string(n) + " would list 2^" +
                                  std::to_string(n * (n + 1) / 2) + " tilings; limit is n <= " +
                                  std::to_string(kMaxEnumerationOrder));
  }
  AztecDiamond ad(n);
  std::vector<Square> order = ad.squares();  // top-to-bottom, left-to-right
  CoverGrid grid(n);
  std::vector<Domino> current;
  std::vector<WeightedTiling> out;
  int verticals = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    while (pos < order.size() && grid.get(order[pos]) != -1) ++pos;
    if (pos == order.size()) {
      out.push_back({{n, current}, rational_pow(w, verticals)});
      return;
    }
    Square s = order[pos];
    for (Domino d : {Domino{s.m, s.l, Orientation::horizontal},
                     Domino{s.m, s.l - 1, Orientation::vertical}}) {
      Square other = d.orientation == Orientation::horizontal ? d.second() : d.first();
      if (!ad.contains(other) || grid.get(other) != -1) continue;
      int id = static_cast<int>(current.size());
      grid.at(s) = grid.at(other) = id;
      current.push_back(d);
      verticals += d.orientation == Orientation::vertical;
      rec(pos + 1);
      verticals -= d.orientation == Orientation::vertical;
      current.pop_back();
      grid.at(s) = grid.at(other) = -1;
    }
  };
  rec(0);
  return out;
}

inline std::vector<Rational> vertical_count_law_exact(int n, const Rational& q) {
  require(n >= 0, "domain", "order must be nonnegative");
  require(q > 0 && q < 1, "domain", "q must lie in (0,1)");
  const int pairs = n * (n + 1) / 2;
  std::vector<Rational> law(static_cast<std::size_t>(pairs + 1));
  for (int k = 0; k <= pairs; ++k)
    law[k] = Rational(binomial(pairs, k)) * rational_pow(q, k) * rational_pow(1 - q, pairs - k);
  return law;
}

// P(2k vertical dominoes), k = 0..n(n+1)/2.
inline std::vector<double> vertical_count_law(int n, double q) {
  require(n >= 0, "domain", "order must be nonnegative");
  require(q > 0 && q < 1, "domain", "q must lie in (0,1)");
  const int pairs = n * (n + 1) / 2;
  std::vector<double> law(static_cast<std::size_t>(pairs + 1));
  for (int k = 0; k <= pairs; ++k)
    law[k] = std::exp(std::lgamma(pairs + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(pairs - k + 1.0) + k * std::log(q) +
                      (pairs - k) * std::log1p(-q));
  return law;
}

// Exact law of the level-r zig-zag particles under the weight-w measure, by enumeration.
inline std::map<std::vector<int>, Rational> zigzag_law_enumerated(int n, int r, const Rational& w) {
  require(r >= 1 && r <= n, "domain", "level must lie in 1..n");
  std::map<std::vector<int>, Rational> law;
  Rational total = 0;
  for (const auto& wt : enumerate_tilings(n, w)) {
    law[zigzag_config(wt.tiling, r).particles.positions] += wt.weight;
    total += wt.weight;
  }
  for (auto& [h, p] : law) p /= total;
  return law;
}

// Total variation distance between the enumerated zig-zag law and the Krawtchouk
// ensemble with r particles on {0..n}, p = w^2/(1+w^2).
inline Rational zigzag_krawtchouk_tv(int n, int r, const Rational& w) {
  const auto law = zigzag_law_enumerated(n, r, w);
  const Rational q = w * w / (1 + w * w);
  Rational tv = 0;
  std::vector<int> h;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(h.size()) == r) {
      auto it = law.find(h);
      Rational e = it == law.end() ? Rational(0) : it->second;
      Rational d = e - krawtchouk_ensemble_mass(h, n, q);
      tv += d < 0 ? Rational(-d) : d;
      return;
    }
    for (int x = from; x <= n; ++x) {
      h.push_back(x);
      rec(x + 1);
      h.pop_back();
    }
  };
  rec(0);
  return tv / 2;
}

}  // namespace tilings

#pragma once

// Aztec diamond geometry: domino kinds, DR-paths, zig-zag particles,
// height function and polar regions.

#include "tilings/common.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tilings {

enum class Orientation { horizontal, vertical };
enum class Kind { N, S, W, E };
enum class Region { north, south, west, east, temperate };
enum class PathFlavor { type_I, type_II };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::N: return "N";
    case Kind::S: return "S";
    case Kind::W: return "W";
    case Kind::E: return "E";
  }
  return "?";
}

inline const char* to_string(Region r) {
  switch (r) {
    case Region::north: return "north";
    case Region::south: return "south";
    case Region::west: return "west";
    case Region::east: return "east";
    case Region::temperate: return "temperate";
  }
  return "?";
}

inline int mod2(long v) { return static_cast<int>(((v % 2) + 2) % 2); }

// Unit square with lower-left corner (m, l).
struct Square {
  int m = 0, l = 0;
  friend bool operator==(const Square&, const Square&) = default;
  friend auto operator<=>(const Square&, const Square&) = default;
};

// Domino stored by the lower-left corner of its lower-left square.
struct Domino {
  int x = 0, y = 0;
  Orientation orientation = Orientation::horizontal;
  friend bool operator==(const Domino&, const Domino&) = default;
  friend auto operator<=>(const Domino&, const Domino&) = default;

  Square first() const { return {x, y}; }
  Square second() const {
    return orientation == Orientation::horizontal ? Square{x + 1, y} : Square{x, y + 1};
  }
};

class AztecDiamond {
 public:
  explicit AztecDiamond(int order) : n_(order) {
    require(order >= 0, "domain", "Aztec diamond order must be nonnegative");
  }
  int order() const { return n_; }
  int square_count() const { return 2 * n_ * (n_ + 1); }

  // |m + 1/2| + |l + 1/2| <= n
  bool contains(Square s) const {
    return std::abs(2 * s.m + 1) + std::abs(2 * s.l + 1) <= 2 * n_;
  }
  // Colouring extended to all of Z^2; the leftmost square of each top-half
  // row is white.
  bool is_white(Square s) const { return mod2(static_cast<long>(s.m) + s.l + n_) == 0; }

  // Squares of row l are m in [row_begin(l), row_end(l)).
  int row_begin(int l) const { return -(n_ - (l >= 0 ? l : -l - 1)); }
  int row_end(int l) const { return n_ - (l >= 0 ? l : -l - 1); }

  std::vector<Square> squares() const {
    std::vector<Square> out;
    for (int l = n_ - 1; l >= -n_; --l)
      for (int m = row_begin(l); m < row_end(l); ++m) out.push_back({m, l});
    return out;
  }

 private:
  int n_;
};

inline Kind classify_domino(const Domino& d, int n) {
  AztecDiamond ad(n);
  if (!ad.contains(d.first()) || !ad.contains(d.second()))
    throw Error("geometry", "domino at (" + std::to_string(d.x) + "," +
                                std::to_string(d.y) + ") lies outside A_" + std::to_string(n));
  if (d.orientation == Orientation::horizontal)
    return ad.is_white(d.first()) ? Kind::N : Kind::S;
  return ad.is_white(d.second()) ? Kind::W : Kind::E;
}

struct Tiling {
  int order = 0;
  std::vector<Domino> dominoes;
};

inline int vertical_count(const Tiling& t) {
  int v = 0;
  for (const auto& d : t.dominoes) v += d.orientation == Orientation::vertical;
  return v;
}

// Dense lookup of the domino covering each square of A_n.
class CoverGrid {
 public:
  explicit CoverGrid(int n) : n_(n), cells_(static_cast<std::size_t>(4 * n * n), -1) {}
  bool in_box(Square s) const { return s.m >= -n_ && s.m < n_ && s.l >= -n_ && s.l < n_; }
  int& at(Square s) { return cells_[idx(s)]; }
  int get(Square s) const { return in_box(s) ? cells_[idx(s)] : -1; }

 private:
  std::size_t idx(Square s) const {
    return static_cast<std::size_t>((s.l + n_) * 2 * n_ + (s.m + n_));
  }
  int n_;
  std::vector<int> cells_;
};

inline CoverGrid validate_tiling(const Tiling& t) {
  AztecDiamond ad(t.order);
  CoverGrid grid(t.order);
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    const Domino& d = t.dominoes[i];
    for (Square s : {d.first(), d.second()}) {
      if (!ad.contains(s))
        throw Error("validation", "domino covers a square outside the diamond");
      int& c = grid.at(s);
      if (c != -1) throw Error("validation", "dominoes overlap");
      c = static_cast<int>(i);
    }
  }
  if (static_cast<int>(t.dominoes.size()) * 2 != ad.square_count())
    throw Error("validation", "tiling does not cover the diamond");
  return grid;
}

inline bool operator==(const Tiling& a, const Tiling& b) {
  if (a.order != b.order || a.dominoes.size() != b.dominoes.size()) return false;
  auto x = a.dominoes, y = b.dominoes;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

// 180-degree rotation about the centre; preserves colours, swaps N<->S, W<->E.
inline Tiling rotate_half_turn(const Tiling& t) {
  Tiling r{t.order, {}};
  r.dominoes.reserve(t.dominoes.size());
  for (const auto& d : t.dominoes) {
    if (d.orientation == Orientation::horizontal)
      r.dominoes.push_back({-d.x - 2, -d.y - 1, Orientation::horizontal});
    else
      r.dominoes.push_back({-d.x - 1, -d.y - 2, Orientation::vertical});
  }
  return r;
}

// ---------------------------------------------------------------------------
// DR-paths

struct LatticePoint {
  int x = 0, y = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

struct DRPathFamily {
  PathFlavor flavor = PathFlavor::type_I;
  int order = 0;
  // paths[k-1] starts at (k, 0) and ends at (n+1, n+1-k).
  std::vector<std::vector<LatticePoint>> paths;
};

namespace detail {

// Point of the original frame stored doubled: (2X, 2Y).
struct Doubled {
  int x2, y2;
};

// CS-I has origin (n+1, 1/2) and basis (-1,-1), (-1,1).
inline LatticePoint to_cs1(Doubled p, int n) {
  int u = 2 * n + 2 - p.x2 - p.y2 + 1;
  int v = 2 * n + 2 - p.x2 + p.y2 - 1;
  if (u % 4 != 0 || v % 4 != 0) throw Error("validation", "marking off the CS-I lattice");
  return {u / 4, v / 4};
}

inline Doubled from_cs1(LatticePoint p, int n) {
  return {2 * (n + 1 - p.x - p.y), 1 - 2 * p.x + 2 * p.y};
}

inline std::vector<std::vector<LatticePoint>> type1_paths(const Tiling& t) {
  const int n = t.order;
  validate_tiling(t);
  std::map<LatticePoint, LatticePoint> next;
  for (const auto& d : t.dominoes) {
    Kind k = classify_domino(d, n);
    Doubled from{}, to{};
    switch (k) {
      case Kind::N: continue;
      case Kind::S:
        from = {2 * d.x + 4, 2 * d.y + 1};
        to = {2 * d.x, 2 * d.y + 1};
        break;
      case Kind::W:
        from = {2 * d.x + 2, 2 * d.y + 3};
        to = {2 * d.x, 2 * d.y + 1};
        break;
      case Kind::E:
        from = {2 * d.x + 2, 2 * d.y + 1};
        to = {2 * d.x, 2 * d.y + 3};
        break;
    }
    LatticePoint a = to_cs1(from, n), b = to_cs1(to, n);
    if (!next.emplace(a, b).second) throw Error("validation", "DR-paths branch");
  }
  std::vector<std::vector<LatticePoint>> paths;
  std::size_t used = 0;
  for (int k = 1; k <= n; ++k) {
    std::vector<LatticePoint> path{{k, 0}};
    while (path.back().x < n + 1) {
      auto it = next.find(path.back());
      if (it == next.end()) throw Error("validation", "DR-path ends early");
      LatticePoint d{it->second.x - path.back().x, it->second.y - path.back().y};
      if (!(d == LatticePoint{1, 0} || d == LatticePoint{0, 1} || d == LatticePoint{1, 1}))
        throw Error("validation", "DR-path has an illegal step");
      path.push_back(it->second);
      ++used;
    }
    if (path.back() != LatticePoint{n + 1, n + 1 - k})
      throw Error("validation", "DR-path ends at the wrong point");
    paths.push_back(std::move(path));
  }
  if (used != next.size()) throw Error("validation", "stray DR-path segments");
  return paths;
}

inline Tiling tiling_from_type1(const std::vector<std::vector<LatticePoint>>& paths, int n) {
  AztecDiamond ad(n);
  Tiling t{n, {}};
  CoverGrid grid(n);
  auto place = [&](Domino d) {
    for (Square s : {d.first(), d.second()}) {
      if (!ad.contains(s) || grid.get(s) != -1)
        throw Error("validation", "paths do not describe a tiling");
      grid.at(s) = static_cast<int>(t.dominoes.size());
    }
    t.dominoes.push_back(d);
  };
  for (const auto& path : paths) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      Doubled p = from_cs1(path[i], n);
      int X = p.x2 / 2;  // even by construction
      int dx = path[i + 1].x - path[i].x, dy = path[i + 1].y - path[i].y;
      // y2 = 2Y is odd; Y - 1/2 = (y2 - 1) / 2.
      int y_low = (p.y2 - 1) / 2;
      Domino d;
      if (dx == 1 && dy == 1)
        d = {X - 2, y_low, Orientation::horizontal};
      else if (dx == 1 && dy == 0)
        d = {X - 1, y_low - 1, Orientation::vertical};
      else if (dx == 0 && dy == 1)
        d = {X - 1, y_low, Orientation::vertical};
      else
        throw Error("validation", "illegal DR step");
      place(d);
    }
  }
  for (Square s : ad.squares()) {
    if (grid.get(s) != -1 || !ad.is_white(s)) continue;
    place({s.m, s.l, Orientation::horizontal});
  }
  validate_tiling(t);
  return t;
}

}  // namespace detail

inline DRPathFamily extract_dr_paths(const Tiling& t, PathFlavor flavor) {
  DRPathFamily f{flavor, t.order, {}};
  f.paths = detail::type1_paths(flavor == PathFlavor::type_I ? t : rotate_half_turn(t));
  return f;
}

inline Tiling tiling_from_dr_paths(const DRPathFamily& f) {
  Tiling t = detail::tiling_from_type1(f.paths, f.order);
  return f.flavor == PathFlavor::type_I ? t : rotate_half_turn(t);
}

// ---------------------------------------------------------------------------
// Zig-zag configurations

struct ParticleConfig {
  int window = 0;  // positions lie in {0, ..., window}
  std::vector<int> positions;
};

struct ZigZag {
  ParticleConfig particles, holes;
};

// Lower-left corner of the k-th white zig-zag square on line r.
inline Square zigzag_square(int n, int r, int k) { return {-r + k, n - k - r}; }

inline ZigZag zigzag_config(const Tiling& t, int r) {
  const int n = t.order;
  require(r >= 1 && r <= n, "domain", "zig-zag line r must satisfy 1 <= r <= n");
  CoverGrid grid = validate_tiling(t);
  ZigZag z{{n, {}}, {n, {}}};
  for (int k = 0; k <= n; ++k) {
    Square s = zigzag_square(n, r, k);
    const Domino& d = t.dominoes[static_cast<std::size_t>(grid.get(s))];
    Kind kind = classify_domino(d, n);
    bool es = kind == Kind::S || kind == Kind::W;
    (es ? z.particles : z.holes).positions.push_back(n - k);
  }
  std::sort(z.particles.positions.begin(), z.particles.positions.end());
  std::sort(z.holes.positions.begin(), z.holes.positions.end());
  return z;
}

// ---------------------------------------------------------------------------
// Height function on the vertices of A_n.

class HeightField {
 public:
  HeightField() = default;
  explicit HeightField(int n)
      : n_(n), values_(static_cast<std::size_t>((2 * n + 3) * (2 * n + 3)), kUnset) {}
  int order() const { return n_; }
  // Corner of at least one square of A_n.
  bool inside(int x, int y) const {
    if (std::abs(x) + std::abs(y) > n_ + 1) return false;
    AztecDiamond ad(n_);
    return ad.contains({x, y}) || ad.contains({x - 1, y}) || ad.contains({x, y - 1}) ||
           ad.contains({x - 1, y - 1});
  }
  int at(int x, int y) const {
    require(inside(x, y), "domain", "vertex outside the diamond");
    return values_[idx(x, y)];
  }
  bool has(int x, int y) const { return inside(x, y) && values_[idx(x, y)] != kUnset; }
  void set(int x, int y, int v) { values_[idx(x, y)] = v; }
  static constexpr int kUnset = -1 << 30;

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>((y + n_ + 1) * (2 * n_ + 3) + (x + n_ + 1));
  }
  int n_ = 0;
  std::vector<int> values_;
};

namespace detail {

// Square on the left of the unit edge from (x,y) in direction dir.
inline Square left_square(int x, int y, int dx, int dy) {
  if (dx == 1) return {x, y};
  if (dx == -1) return {x - 1, y - 1};
  if (dy == 1) return {x - 1, y};
  return {x, y - 1};
}
inline Square right_square(int x, int y, int dx, int dy) {
  if (dx == 1) return {x, y - 1};
  if (dx == -1) return {x - 1, y};
  if (dy == 1) return {x, y};
  return {x - 1, y - 1};
}

}  // namespace detail

inline HeightField height_function(const Tiling& t) {
  const int n = t.order;
  AztecDiamond ad(n);
  CoverGrid grid = validate_tiling(t);
  HeightField h(n);
  constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  auto edge_in_region = [&](int x, int y, int dx, int dy) {
    return ad.contains(detail::left_square(x, y, dx, dy)) ||
           ad.contains(detail::right_square(x, y, dx, dy));
  };
  auto covered = [&](int x, int y, int dx, int dy) {
    Square a = detail::left_square(x, y, dx, dy), b = detail::right_square(x, y, dx, dy);
    int ga = ad.contains(a) ? grid.get(a) : -1, gb = ad.contains(b) ? grid.get(b) : -1;
    return ga != -1 && ga == gb;
  };
  auto step = [&](int x, int y, int dx, int dy) {
    return ad.is_white(detail::left_square(x, y, dx, dy)) ? -1 : 1;
  };
  std::deque<std::pair<int, int>> queue{{n, 0}};
  h.set(n, 0, 0);
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    for (auto [dx, dy] : dirs) {
      int u = x + dx, v = y + dy;
      if (!h.inside(u, v) || !edge_in_region(x, y, dx, dy) || covered(x, y, dx, dy)) continue;
      int value = h.at(x, y) + step(x, y, dx, dy);
      if (!h.has(u, v)) {
        h.set(u, v, value);
        queue.emplace_back(u, v);
      } else if (h.at(u, v) != value) {
        throw Error("validation", "height function is not integrable");
      }
    }
  }
  for (int y = -n - 1; y <= n + 1; ++y)
    for (int x = -n - 1; x <= n + 1; ++x) {
      if (!h.inside(x, y)) continue;
      if (!h.has(x, y)) throw Error("validation", "height function has unreached vertices");
      for (auto [dx, dy] : dirs) {
        int u = x + dx, v = y + dy;
        if (!h.inside(u, v) || !edge_in_region(x, y, dx, dy)) continue;
        int diff = std::abs(h.at(u, v) - h.at(x, y));
        if (diff != (covered(x, y, dx, dy) ? 3 : 1))
          throw Error("validation", "height function violates the local rule");
      }
    }
  return h;
}

// Upper-left corner of the k-th zig-zag square; k = n+1 is the corner
// following the last square.
inline LatticePoint zigzag_corner(int n, int r, int k) { return {-r + k, n + 1 - k - r}; }

inline int height_from_particles(int n, int r, int k, const ParticleConfig& particles) {
  require(k >= 0 && k <= n + 1, "domain", "zig-zag index k out of range");
  int nu = 0;
  for (int p : particles.positions) nu += p <= n - k;
  return 2 * (n - k + r) + 1 - 4 * nu;
}

// ---------------------------------------------------------------------------
// Polar regions

inline std::vector<Region> polar_regions(const Tiling& t) {
  const int n = t.order;
  AztecDiamond ad(n);
  CoverGrid grid = validate_tiling(t);
  const std::size_t count = t.dominoes.size();
  std::vector<Kind> kinds(count);
  for (std::size_t i = 0; i < count; ++i) kinds[i] = classify_domino(t.dominoes[i], n);
  std::vector<Region> region(count, Region::temperate);
  constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  auto touches_boundary = [&](const Domino& d) {
    for (Square s : {d.first(), d.second()})
      for (auto [dx, dy] : dirs)
        if (!ad.contains({s.m + dx, s.l + dy})) return true;
    return false;
  };
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < count; ++i)
    if (touches_boundary(t.dominoes[i])) {
      region[i] = static_cast<Region>(static_cast<int>(kinds[i]));
      queue.push_back(i);
    }
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    const Domino& d = t.dominoes[i];
    for (Square s : {d.first(), d.second()})
      for (auto [dx, dy] : dirs) {
        Square nb{s.m + dx, s.l + dy};
        if (!ad.contains(nb)) continue;
        auto j = static_cast<std::size_t>(grid.get(nb));
        if (j == i || kinds[j] != kinds[i] || region[j] != Region::temperate) continue;
        region[j] = region[i];
        queue.push_back(j);
      }
  }
  return region;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const Tiling& t) {
  nlohmann::json doms = nlohmann::json::array();
  for (const auto& d : t.dominoes)
    doms.push_back({{"x", d.x},
                    {"y", d.y},
                    {"orientation", d.orientation == Orientation::horizontal ? "horizontal"
                                                                            : "vertical"}});
  return {{"order", t.order}, {"dominoes", doms}};
}

inline Tiling tiling_from_json(const nlohmann::json& j) {
  Tiling t{j.at("order").get<int>(), {}};
  for (const auto& d : j.at("dominoes")) {
    std::string o = d.at("orientation").get<std::string>();
    require(o == "horizontal" || o == "vertical", "validation", "bad orientation " + o);
    t.dominoes.push_back({d.at("x").get<int>(), d.at("y").get<int>(),
                          o == "horizontal" ? Orientation::horizontal : Orientation::vertical});
  }
  validate_tiling(t);
  return t;
}

}  // namespace tilings

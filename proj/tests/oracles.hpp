// Independent reference implementations used only by the tests. Nothing here
// calls into the pattern, canon or strategy modules; they work on plain
// adjacency matrices so a shared bug cannot hide on both sides.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "k4/board.hpp"

namespace oracle {

/// 0 = unclaimed, 1 = first player, 2 = second player.
struct Matrix {
  int n = 0;
  std::vector<std::uint8_t> c;

  explicit Matrix(int size = 0) : n(size), c(static_cast<std::size_t>(size * size), 0) {}
  std::uint8_t at(int u, int v) const { return c[static_cast<std::size_t>(u * n + v)]; }
  void set(int u, int v, std::uint8_t col) {
    c[static_cast<std::size_t>(u * n + v)] = col;
    c[static_cast<std::size_t>(v * n + u)] = col;
  }
};

inline Matrix from_board(const k4::ColoredBoard& b) {
  Matrix m(b.size());
  for (int u = 0; u < b.size(); ++u) {
    for (int v = u + 1; v < b.size(); ++v) m.set(u, v, static_cast<std::uint8_t>(b.at(u, v)));
  }
  return m;
}

/// All quads of the given colour that have every edge.
inline std::vector<std::array<int, 4>> k4s(const Matrix& m, std::uint8_t col) {
  std::vector<std::array<int, 4>> out;
  for (int a = 0; a < m.n; ++a)
    for (int b = a + 1; b < m.n; ++b)
      for (int c = b + 1; c < m.n; ++c)
        for (int d = c + 1; d < m.n; ++d) {
          const int q[4] = {a, b, c, d};
          bool all = true;
          for (int i = 0; i < 4 && all; ++i)
            for (int j = i + 1; j < 4 && all; ++j) all = m.at(q[i], q[j]) == col;
          if (all) out.push_back({a, b, c, d});
        }
  return out;
}

/// (quad, missing pair) with five edges of `col` and the sixth unclaimed.
inline std::vector<std::pair<std::array<int, 4>, std::pair<int, int>>> threats(const Matrix& m,
                                                                             std::uint8_t col) {
  std::vector<std::pair<std::array<int, 4>, std::pair<int, int>>> out;
  for (int a = 0; a < m.n; ++a)
    for (int b = a + 1; b < m.n; ++b)
      for (int c = b + 1; c < m.n; ++c)
        for (int d = c + 1; d < m.n; ++d) {
          const int q[4] = {a, b, c, d};
          int own = 0, free = 0;
          std::pair<int, int> gap{-1, -1};
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
              if (m.at(q[i], q[j]) == col) ++own;
              if (m.at(q[i], q[j]) == 0) {
                ++free;
                gap = {q[i], q[j]};
              }
            }
          if (own == 5 && free == 1) out.push_back({{a, b, c, d}, gap});
        }
  std::sort(out.begin(), out.end());
  return out;
}

/// Distinct unclaimed pairs that complete a K4 for `col`.
inline std::set<std::pair<int, int>> completions(const Matrix& m, std::uint8_t col) {
  std::set<std::pair<int, int>> s;
  for (const auto& t : threats(m, col)) s.insert(t.second);
  return s;
}

/// Small 2-edge-coloured graph on vertices 0..k-1 with optional vertex colours.
struct Graph {
  int k = 0;
  std::vector<std::uint8_t> c;  // k*k edge colours
  std::vector<std::uint32_t> vcol;

  explicit Graph(int size = 0)
      : k(size), c(static_cast<std::size_t>(size * size), 0), vcol(static_cast<std::size_t>(size), 0) {}
  std::uint8_t at(int u, int v) const { return c[static_cast<std::size_t>(u * k + v)]; }
  void set(int u, int v, std::uint8_t col) {
    c[static_cast<std::size_t>(u * k + v)] = col;
    c[static_cast<std::size_t>(v * k + u)] = col;
  }
  int degree(int v, std::uint8_t col) const {
    int d = 0;
    for (int u = 0; u < k; ++u) d += (u != v && at(u, v) == col);
    return d;
  }
};

inline Graph permuted(const Graph& g, const std::vector<int>& perm) {
  Graph h(g.k);
  for (int u = 0; u < g.k; ++u) {
    h.vcol[static_cast<std::size_t>(perm[u])] = g.vcol[static_cast<std::size_t>(u)];
    for (int v = u + 1; v < g.k; ++v) h.set(perm[u], perm[v], g.at(u, v));
  }
  return h;
}

/// Backtracking isomorphism test with degree pruning. Exact for any size;
/// fast enough for the dozen-vertex graphs the tests use.
inline bool isomorphic(const Graph& g, const Graph& h) {
  if (g.k != h.k) return false;
  const int k = g.k;
  auto sig = [](const Graph& x, int v) {
    return std::array<std::uint32_t, 3>{x.vcol[static_cast<std::size_t>(v)],
                                        static_cast<std::uint32_t>(x.degree(v, 1)),
                                        static_cast<std::uint32_t>(x.degree(v, 2))};
  };
  std::vector<std::array<std::uint32_t, 3>> sg(k), sh(k);
  for (int v = 0; v < k; ++v) {
    sg[v] = sig(g, v);
    sh[v] = sig(h, v);
  }
  {
    auto a = sg, b = sh;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  std::vector<int> map(k, -1);
  std::vector<bool> used(k, false);
  std::function<bool(int)> extend = [&](int v) -> bool {
    if (v == k) return true;
    for (int w = 0; w < k; ++w) {
      if (used[w] || sg[v] != sh[w]) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) ok = g.at(u, v) == h.at(map[u], w);
      if (!ok) continue;
      map[v] = w;
      used[w] = true;
      if (extend(v + 1)) return true;
      used[w] = false;
    }
    map[v] = -1;
    return false;
  };
  return extend(0);
}

/// Every injective map of `pattern` vertices into the board vertices whose
/// listed pairs carry the required colours (0 = must be unclaimed,
/// 3 = either second player or unclaimed, 4 = anything when `induced` is
/// false). Returned in lexicographic order.
struct PatternSpec {
  int k = 0;
  std::vector<std::uint8_t> want;  // k*k; 0,1,2 exact, 3 sp-or-free, 4 any
};

inline std::vector<std::vector<int>> embeddings(const Matrix& board, const PatternSpec& p) {
  std::vector<std::vector<int>> out;
  std::vector<int> img;
  std::vector<bool> used(static_cast<std::size_t>(board.n), false);
  std::function<void()> rec = [&] {
    const int i = static_cast<int>(img.size());
    if (i == p.k) {
      out.push_back(img);
      return;
    }
    for (int x = 0; x < board.n; ++x) {
      if (used[static_cast<std::size_t>(x)]) continue;
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) {
        const std::uint8_t w = p.want[static_cast<std::size_t>(j * p.k + i)];
        const std::uint8_t got = board.at(img[static_cast<std::size_t>(j)], x);
        if (w == 4) continue;
        ok = w == 3 ? (got == 0 || got == 2) : got == w;
      }
      if (!ok) continue;
      used[static_cast<std::size_t>(x)] = true;
      img.push_back(x);
      rec();
      img.pop_back();
      used[static_cast<std::size_t>(x)] = false;
    }
  };
  rec();
  return out;
}

inline k4::ColoredBoard random_board(std::mt19937_64& rng, int n, int moves) {
  k4::ColoredBoard b(n);
  std::vector<k4::Edge> free = b.unclaimed_edges();
  std::shuffle(free.begin(), free.end(), rng);
  for (int i = 0; i < moves && i < static_cast<int>(free.size()); ++i) {
    b.claim({i % 2 == 0 ? k4::Player::First : k4::Player::Second, free[static_cast<std::size_t>(i)]});
  }
  return b;
}

/// Game value by plain negamax with no memo: 2 = first player forms a clique
/// of `need` vertices within `plies`, 0 = second player does, 1 = neither.
inline int game_value(Matrix& m, int mover, int plies, int need) {
  auto wins_with = [&](int u, int v, int p) {
    std::vector<int> common;
    for (int w = 0; w < m.n; ++w) {
      if (w != u && w != v && m.at(u, w) == p && m.at(v, w) == p) common.push_back(w);
    }
    if (need == 3) return !common.empty();
    for (std::size_t i = 0; i < common.size(); ++i)
      for (std::size_t j = i + 1; j < common.size(); ++j)
        if (m.at(common[i], common[j]) == p) return true;
    return false;
  };
  const int good = mover == 1 ? 2 : 0;
  int best = mover == 1 ? 0 : 2;
  bool any = false;
  if (plies > 0) {
    for (int u = 0; u < m.n && best != good; ++u)
      for (int v = u + 1; v < m.n && best != good; ++v) {
        if (m.at(u, v) != 0) continue;
        any = true;
        int r;
        if (wins_with(u, v, mover)) {
          r = good;
        } else {
          m.set(u, v, static_cast<std::uint8_t>(mover));
          r = game_value(m, 3 - mover, plies - 1, need);
          m.set(u, v, 0);
        }
        best = mover == 1 ? std::max(best, r) : std::min(best, r);
      }
  }
  return any ? best : 1;
}

}  // namespace oracle

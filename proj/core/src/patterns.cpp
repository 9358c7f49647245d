#include "k4/patterns.hpp"

#include <algorithm>

namespace k4 {
namespace {

// Vertices that can take part in a p-coloured structure.
VertexMask active(const ColoredBoard& board, Player p) {
  VertexMask m = 0;
  for_each_bit(board.all_vertices(), [&](Vertex v) {
    if (board.neighbours(p, v) != 0) m |= bit(v);
  });
  return m;
}

template <typename F>
void for_each_completion(const ColoredBoard& board, Player p, F&& f) {
  const VertexMask act = active(board, p);
  for_each_bit(act, [&](Vertex u) {
    const VertexMask later = act & ~((bit(u) << 1) - 1);
    const VertexMask open = later & ~board.claimed_neighbours(u);
    for_each_bit(open, [&](Vertex v) {
      if (completes_k4(board, p, Edge(u, v))) f(Edge(u, v));
    });
  });
}

}  // namespace

std::optional<Quad> find_k4(const ColoredBoard& board, Player p) {
  const VertexMask act = active(board, p);
  std::optional<Quad> best;
  for_each_bit(act, [&](Vertex a) {
    if (best) return;
    const VertexMask na = board.neighbours(p, a) & ~((bit(a) << 1) - 1);
    for_each_bit(na, [&](Vertex b) {
      if (best) return;
      const VertexMask nab = na & board.neighbours(p, b) & ~((bit(b) << 1) - 1);
      for_each_bit(nab, [&](Vertex c) {
        if (best) return;
        const VertexMask nabc = nab & board.neighbours(p, c) & ~((bit(c) << 1) - 1);
        if (nabc != 0) best = Quad{a, b, c, lowest(nabc)};
      });
    });
  });
  return best;
}

bool has_k4(const ColoredBoard& board, Player p) { return find_k4(board, p).has_value(); }

std::vector<ThreatRecord> threats(const ColoredBoard& board, Player p) {
  std::vector<ThreatRecord> out;
  for_each_completion(board, p, [&](Edge e) {
    const VertexMask common = board.neighbours(p, e.u) & board.neighbours(p, e.v);
    for_each_bit(common, [&](Vertex x) {
      const VertexMask ys = common & board.neighbours(p, x) & ~((bit(x) << 1) - 1);
      for_each_bit(ys, [&](Vertex y) {
        Quad q{e.u, e.v, x, y};
        std::sort(q.begin(), q.end());
        out.push_back({p, q, e});
      });
    });
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> winning_completions(const ColoredBoard& board, Player p) {
  std::vector<Edge> out;
  for_each_completion(board, p, [&](Edge e) { out.push_back(e); });
  return out;
}

int completion_count(const ColoredBoard& board, Player p, int limit) {
  int count = 0;
  const VertexMask act = active(board, p);
  for_each_bit(act, [&](Vertex u) {
    if (count >= limit) return;
    const VertexMask later = act & ~((bit(u) << 1) - 1);
    const VertexMask open = later & ~board.claimed_neighbours(u);
    for_each_bit(open, [&](Vertex v) {
      if (count >= limit) return;
      if (completes_k4(board, p, Edge(u, v))) ++count;
    });
  });
  return count;
}

std::optional<Edge> first_completion(const ColoredBoard& board, Player p) {
  std::optional<Edge> found;
  const VertexMask act = active(board, p);
  for_each_bit(act, [&](Vertex u) {
    if (found) return;
    const VertexMask later = act & ~((bit(u) << 1) - 1);
    const VertexMask open = later & ~board.claimed_neighbours(u);
    for_each_bit(open, [&](Vertex v) {
      if (!found && completes_k4(board, p, Edge(u, v))) found = Edge(u, v);
    });
  });
  return found;
}

bool double_threat(const ColoredBoard& board, Player p) {
  return completion_count(board, p, 2) >= 2;
}

std::vector<ThreatSeed> threat_seeds(const ColoredBoard& board, Player p) {
  std::vector<ThreatSeed> out;
  const Player q = opponent(p);
  const VertexMask act = active(board, p);
  for_each_bit(act, [&](Vertex a) {
    for_each_bit(act & ~((bit(a) << 1) - 1), [&](Vertex b) {
      for_each_bit(act & ~((bit(b) << 1) - 1), [&](Vertex c) {
        for_each_bit(act & ~((bit(c) << 1) - 1), [&](Vertex d) {
          const VertexMask quad = bit(a) | bit(b) | bit(c) | bit(d);
          int edges = 0;
          bool foreign = false;
          std::array<int, 4> deg{};
          const Quad vs{a, b, c, d};
          for (int i = 0; i < 4; ++i) {
            deg[i] = popcount(board.neighbours(p, vs[i]) & quad);
            edges += deg[i];
            if ((board.neighbours(q, vs[i]) & quad) != 0) foreign = true;
          }
          edges /= 2;
          if (foreign || edges != 4) return;
          const bool cycle =
              std::all_of(deg.begin(), deg.end(), [](int x) { return x == 2; });
          out.push_back({p, vs, cycle ? SeedShape::C4 : SeedShape::TrianglePlusEdge});
        });
      });
    });
  });
  return out;
}

}  // namespace k4

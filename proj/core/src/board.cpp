#include "k4/board.hpp"

#include <algorithm>

namespace k4 {

const char* to_string(Player p) { return p == Player::First ? "FP" : "SP"; }

std::string to_string(Edge e) {
  return std::to_string(e.u) + "-" + std::to_string(e.v);
}

ColoredBoard::ColoredBoard(int n) : n_(n) {
  if (n < 1 || n > kMaxVertices) {
    throw BoardError(BoardErrorCode::InvalidSize,
                     "board size must be in [1, 64], got " + std::to_string(n));
  }
}

ColoredBoard new_board(int n) { return ColoredBoard(n); }

void ColoredBoard::check_vertex(Vertex v) const {
  if (v < 0 || v >= n_) {
    throw BoardError(BoardErrorCode::OutOfRange,
                     "vertex " + std::to_string(v) + " out of range for n=" +
                         std::to_string(n_));
  }
}

EdgeState ColoredBoard::at(Edge e) const {
  check_vertex(e.u);
  check_vertex(e.v);
  if ((adj_[0][e.u] >> e.v) & 1U) return EdgeState::First;
  if ((adj_[1][e.u] >> e.v) & 1U) return EdgeState::Second;
  return EdgeState::Unclaimed;
}

VertexMask ColoredBoard::touched() const {
  VertexMask t = 0;
  for (Vertex v = 0; v < n_; ++v) {
    if ((adj_[0][v] | adj_[1][v]) != 0) t |= bit(v);
  }
  return t;
}

int ColoredBoard::degree(Vertex v, Player p) const {
  check_vertex(v);
  return popcount(adj_[index(p)][v]);
}

Vertex ColoredBoard::fresh_vertex() const { return fresh_vertex_excluding(0); }

Vertex ColoredBoard::fresh_vertex_excluding(VertexMask exclude) const {
  const VertexMask free = all_vertices() & ~touched() & ~exclude;
  if (free == 0) {
    throw BoardError(BoardErrorCode::NoFreshVertex,
                     "every vertex is incident with a claimed edge");
  }
  return lowest(free);
}

void ColoredBoard::claim(const Move& m) {
  const Edge e = m.edge;
  check_vertex(e.u);
  check_vertex(e.v);
  if (e.u == e.v) {
    throw BoardError(BoardErrorCode::SelfLoop,
                     "self-loop " + to_string(e) + " is not an edge");
  }
  if (!is_unclaimed(e)) {
    throw BoardError(BoardErrorCode::AlreadyClaimed,
                     "edge " + to_string(e) + " is already claimed");
  }
  const int p = index(m.player);
  adj_[p][e.u] |= bit(e.v);
  adj_[p][e.v] |= bit(e.u);
  ++counts_[p];
  ++ply_;
  last_ = m;
}

ColoredBoard ColoredBoard::claimed(const Move& m) const {
  ColoredBoard next = *this;
  next.claim(m);
  return next;
}

std::vector<Edge> ColoredBoard::edges_of(Player p) const {
  std::vector<Edge> out;
  const auto& adj = adj_[index(p)];
  for (Vertex u = 0; u < n_; ++u) {
    for_each_bit(adj[u] & ~((bit(u) << 1) - 1),
                 [&](Vertex v) { out.emplace_back(u, v); });
  }
  return out;
}

std::vector<Edge> ColoredBoard::unclaimed_edges() const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < n_; ++u) {
    const VertexMask above = all_vertices() & ~((bit(u) << 1) - 1);
    for_each_bit(above & ~claimed_neighbours(u),
                 [&](Vertex v) { out.emplace_back(u, v); });
  }
  return out;
}

ColoredBoard ColoredBoard::relabeled(const std::vector<Vertex>& perm) const {
  if (static_cast<int>(perm.size()) != n_) {
    throw BoardError(BoardErrorCode::InvalidSize,
                     "permutation size does not match board size");
  }
  ColoredBoard out(n_);
  for (Player p : {Player::First, Player::Second}) {
    for (Edge e : edges_of(p)) out.claim({p, Edge(perm[e.u], perm[e.v])});
  }
  return out;
}

bool operator==(const ColoredBoard& a, const ColoredBoard& b) {
  if (a.n_ != b.n_ || a.ply_ != b.ply_) return false;
  for (int p = 0; p < 2; ++p) {
    if (!std::equal(a.adj_[p].begin(), a.adj_[p].begin() + a.n_,
                    b.adj_[p].begin())) {
      return false;
    }
  }
  return true;
}

}  // namespace k4

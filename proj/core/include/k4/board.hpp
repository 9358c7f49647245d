#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace k4 {

inline constexpr int kMaxVertices = 64;
inline constexpr int kDefaultBoardSize = 17;

using Vertex = int;
using VertexMask = std::uint64_t;

enum class Player : std::uint8_t { First = 0, Second = 1 };

constexpr Player opponent(Player p) {
  return p == Player::First ? Player::Second : Player::First;
}

const char* to_string(Player p);

enum class EdgeState : std::uint8_t { Unclaimed = 0, First = 1, Second = 2 };

constexpr EdgeState owned_by(Player p) {
  return p == Player::First ? EdgeState::First : EdgeState::Second;
}

/// Unordered vertex pair, stored with u < v.
struct Edge {
  std::uint8_t u = 0;
  std::uint8_t v = 0;

  constexpr Edge() = default;
  constexpr Edge(Vertex a, Vertex b)
      : u(static_cast<std::uint8_t>(a < b ? a : b)),
        v(static_cast<std::uint8_t>(a < b ? b : a)) {}

  constexpr bool touches(Vertex x) const { return u == x || v == x; }
  constexpr bool shares_vertex(Edge o) const {
    return touches(o.u) || touches(o.v);
  }
  constexpr Vertex other(Vertex x) const { return u == x ? v : u; }

  friend constexpr auto operator<=>(Edge, Edge) = default;
};

std::string to_string(Edge e);

struct Move {
  Player player = Player::First;
  Edge edge;

  friend constexpr bool operator==(const Move&, const Move&) = default;
};

enum class BoardErrorCode {
  InvalidSize,
  OutOfRange,
  SelfLoop,
  AlreadyClaimed,
  NoFreshVertex,
};

class BoardError : public std::runtime_error {
 public:
  BoardError(BoardErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  BoardErrorCode code() const { return code_; }

 private:
  BoardErrorCode code_;
};

/// Complete graph K^n whose edges are Unclaimed or owned by one player.
///
/// Adjacency is kept as one bitmask per vertex and player, so every query
/// used by the pattern engine is a handful of word operations. The value is
/// cheap to copy (about 1 KiB) and `claimed` returns a new board; the search
/// relies on that to keep positions immutable.
class ColoredBoard {
 public:
  explicit ColoredBoard(int n = kDefaultBoardSize);

  int size() const { return n_; }
  int ply() const { return ply_; }
  int edge_count() const { return n_ * (n_ - 1) / 2; }
  int unclaimed_count() const { return edge_count() - ply_; }
  int claimed_by(Player p) const { return counts_[index(p)]; }

  EdgeState at(Edge e) const;
  EdgeState at(Vertex a, Vertex b) const { return at(Edge(a, b)); }
  bool is_unclaimed(Edge e) const { return at(e) == EdgeState::Unclaimed; }
  bool owns(Player p, Vertex a, Vertex b) const {
    return (adj_[index(p)][a] >> b) & 1U;
  }

  /// Neighbourhood of `v` in the given player's graph.
  VertexMask neighbours(Player p, Vertex v) const { return adj_[index(p)][v]; }
  /// Neighbourhood of `v` over claimed edges of either player.
  VertexMask claimed_neighbours(Vertex v) const {
    return adj_[0][v] | adj_[1][v];
  }
  VertexMask all_vertices() const {
    return n_ == 64 ? ~VertexMask{0} : ((VertexMask{1} << n_) - 1);
  }
  /// Vertices incident with at least one claimed edge.
  VertexMask touched() const;

  int degree(Vertex v, Player p) const;

  /// Lowest-index vertex without any claimed edge.
  Vertex fresh_vertex() const;
  /// Lowest-index fresh vertex not in `exclude`.
  Vertex fresh_vertex_excluding(VertexMask exclude) const;

  /// Returns a copy with `m` applied.
  [[nodiscard]] ColoredBoard claimed(const Move& m) const;
  /// In-place variant of `claimed` with identical validation.
  void claim(const Move& m);

  /// Most recent claim applied to this board, if any.
  const std::optional<Move>& last_move() const { return last_; }

  /// Player whose turn it is in a legal alternating game.
  Player to_move() const {
    return counts_[0] == counts_[1] ? Player::First : Player::Second;
  }

  std::vector<Edge> edges_of(Player p) const;
  std::vector<Edge> unclaimed_edges() const;

  /// Relabels vertices: vertex v becomes perm[v].
  [[nodiscard]] ColoredBoard relabeled(const std::vector<Vertex>& perm) const;

  friend bool operator==(const ColoredBoard& a, const ColoredBoard& b);

 private:
  static constexpr int index(Player p) { return static_cast<int>(p); }
  void check_vertex(Vertex v) const;

  int n_;
  int ply_ = 0;
  std::optional<Move> last_;
  std::array<int, 2> counts_{0, 0};
  std::array<std::array<VertexMask, kMaxVertices>, 2> adj_{};
};

ColoredBoard new_board(int n);

inline int popcount(VertexMask m) { return std::popcount(m); }
inline Vertex lowest(VertexMask m) { return std::countr_zero(m); }

/// Visits set bits of `m` in increasing order.
template <typename F>
inline void for_each_bit(VertexMask m, F&& f) {
  while (m != 0) {
    const Vertex v = std::countr_zero(m);
    m &= m - 1;
    f(v);
  }
}

inline constexpr VertexMask bit(Vertex v) { return VertexMask{1} << v; }

}  // namespace k4

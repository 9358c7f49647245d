#pragma once

#include <array>
#include <optional>
#include <vector>

#include "k4/board.hpp"

namespace k4 {

using Quad = std::array<Vertex, 4>;

/// A K4-minus in one colour whose sixth edge is still unclaimed.
struct ThreatRecord {
  Player player = Player::First;
  Quad quad{};  // sorted ascending
  Edge missing_edge;

  friend auto operator<=>(const ThreatRecord&, const ThreatRecord&) = default;
};

enum class SeedShape : std::uint8_t { C4, TrianglePlusEdge };

/// Four vertices spanning exactly four edges of one colour and none of the
/// other: a 4-cycle or a triangle with a pendant edge.
struct ThreatSeed {
  Player player = Player::First;
  Quad quad{};
  SeedShape shape = SeedShape::C4;

  friend auto operator<=>(const ThreatSeed&, const ThreatSeed&) = default;
};

/// Lexicographically least monochromatic K4 of `p`, if any.
std::optional<Quad> find_k4(const ColoredBoard& board, Player p);

/// Every (quad, missing edge) pair forming a live threat, sorted.
std::vector<ThreatRecord> threats(const ColoredBoard& board, Player p);

/// Unclaimed edges whose claim by `p` completes a K4, sorted.
std::vector<Edge> winning_completions(const ColoredBoard& board, Player p);

/// True when `p` holds at least two distinct completing edges.
bool double_threat(const ColoredBoard& board, Player p);

std::vector<ThreatSeed> threat_seeds(const ColoredBoard& board, Player p);

// Fast predicates used on the search hot path.

/// True if claiming the (currently unclaimed) edge `e` completes a K4 for p.
inline bool completes_k4(const ColoredBoard& board, Player p, Edge e) {
  const VertexMask common = board.neighbours(p, e.u) & board.neighbours(p, e.v);
  VertexMask rest = common;
  while (rest != 0) {
    const Vertex x = lowest(rest);
    rest &= rest - 1;
    if ((board.neighbours(p, x) & common) != 0) return true;
  }
  return false;
}

/// Number of completing edges for p, counting at most `limit`.
int completion_count(const ColoredBoard& board, Player p, int limit = 64);

/// Least completing edge for p, if any.
std::optional<Edge> first_completion(const ColoredBoard& board, Player p);

/// True if p owns a K4.
bool has_k4(const ColoredBoard& board, Player p);

}  // namespace k4

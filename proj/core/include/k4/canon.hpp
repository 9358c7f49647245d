#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "k4/board.hpp"

namespace k4 {

/// Label-invariant encoding of a 2-coloured graph. Two boards get equal
/// codes iff a colour-preserving isomorphism maps one claimed subgraph onto
/// the other; untouched vertices are dropped before encoding.
struct CanonicalCode {
  std::vector<std::uint8_t> bytes;

  std::string hex() const;
  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
};

/// Vertex-coloured graph with two edge colours over local ids 0..k-1.
struct ColoredGraph {
  int k = 0;
  std::vector<std::uint32_t> vertex_color;
  std::vector<VertexMask> first;   // FP adjacency
  std::vector<VertexMask> second;  // SP adjacency
};

struct CanonicalForm {
  CanonicalCode code;
  /// order[i] is the local vertex placed at canonical position i.
  std::vector<int> order;
};

/// Exact canonical form by colour refinement plus individualisation, taking
/// the lexicographically least leaf encoding.
CanonicalForm canonical_form(const ColoredGraph& g);

/// Claimed subgraph of `board` restricted to touched vertices plus any
/// vertex in `keep`; `local_to_board` receives the vertex mapping.
ColoredGraph claimed_subgraph(const ColoredBoard& board, VertexMask keep,
                              const std::vector<std::uint32_t>* colors,
                              std::vector<Vertex>* local_to_board);

CanonicalCode canonical_code(const ColoredBoard& board);

}  // namespace k4

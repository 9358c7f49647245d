#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "k4/board.hpp"

namespace k4 {

enum class MatchMode : std::uint8_t { Induced, Exact };

/// Small 2-coloured template over named vertices.
struct PatternFixture {
  using NamedEdge = std::pair<int, int>;  // indices into `vertices`

  std::string name;
  MatchMode mode = MatchMode::Induced;
  std::vector<std::string> vertices;
  std::vector<NamedEdge> fp_edges;
  std::vector<NamedEdge> sp_edges;
  std::vector<NamedEdge> unclaimed_required;
  std::vector<NamedEdge> optional_sp_edges;

  int index_of(std::string_view vertex) const;
};

class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the sectioned fixture format (see core/data/fixtures.txt).
std::vector<PatternFixture> parse_fixtures(std::string_view text);

/// Fixtures compiled into the library from core/data/fixtures.txt.
const std::vector<PatternFixture>& builtin_fixtures();
const PatternFixture& builtin_fixture(std::string_view name);

/// Image of each fixture vertex, indexed like `fixture.vertices`.
using Embedding = std::vector<Vertex>;

/// Lexicographically least embedding of `fixture` (in vertex order), or
/// nothing. Induced fixtures may sit inside a larger board; exact fixtures
/// must account for every claimed edge.
std::optional<Embedding> match_pattern(const ColoredBoard& board, const PatternFixture& fixture);

/// Visits every embedding in lexicographic order until `visit` returns
/// true. Returns whether some visit returned true.
bool for_each_match(const ColoredBoard& board, const PatternFixture& fixture,
                    const std::function<bool(const Embedding&)>& visit);

/// Board holding exactly the fixture's claimed edges, with fixture vertex i
/// placed at `placement[i]` (identity when empty). optional_sp edges are
/// claimed by the second player when `claim_optional` is set.
ColoredBoard embed_fixture(const PatternFixture& fixture, int n,
                           const std::vector<Vertex>& placement = {},
                           bool claim_optional = true);

}  // namespace k4

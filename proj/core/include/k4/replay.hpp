#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "k4/history.hpp"

namespace k4 {

enum class PredicateKind : std::uint8_t {
  SPDoubleThreat,
  FPDoubleThreat,
  NoK4Either,
  MatchesFixture,
  SPCompletions,  // exact set of second-player completing edges
  ForcedBlock,    // move k is the first player's unique block
};

/// One line of an assertion sidecar:
///
///     names: A=0 B=1          vertex names used in the figure
///     after 28 sp-double-threat
///     after 28 sp-completions 7-8 3-7
///     after 10 matches stage5-case-1
///     always no-k4            checked after every move
///     forced 22               move 22 (0-based) blocks the only SP threat
struct Assertion {
  PredicateKind kind = PredicateKind::NoK4Either;
  /// Number of moves applied before evaluation; -1 means after every move.
  int after = -1;
  std::string fixture;
  std::vector<Edge> edges;
  int line = 0;
};

struct ScriptFixture {
  std::string name;
  GameHistory history;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, Vertex>> names;
};

struct AssertionResult {
  Assertion assertion;
  bool passed = false;
  std::string detail;
};

struct FixtureRun {
  bool passed = true;
  std::vector<AssertionResult> results;
  /// Index into `results` of the first failure, or -1.
  int first_failure = -1;
};

std::string describe(const Assertion& a);

/// Parses a sidecar; errors carry the line number.
ScriptFixture parse_fixture(std::string name, std::string_view script, std::string_view sidecar);

/// Loads `path` and the sibling `.assert` file.
ScriptFixture load_fixture(const std::filesystem::path& script_path);

/// Replays the script and evaluates every assertion. Throws ScriptError if
/// the script itself is illegal.
FixtureRun run_fixture(const ScriptFixture& f);

}  // namespace k4

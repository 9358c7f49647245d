#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "k4/board.hpp"

namespace k4 {

/// Moves in play order from the empty board.
struct GameHistory {
  int board_size = kDefaultBoardSize;
  std::vector<Move> moves;

  friend bool operator==(const GameHistory&, const GameHistory&) = default;
};

class ScriptError : public std::runtime_error {
 public:
  ScriptError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses the move-script format:
///
///     # comment
///     board 10
///     FP 0-1
///     SP 2-3
///
/// Syntax errors carry the offending line number. Legality (alternation,
/// reclaimed edges) is checked by `replay`, not here.
GameHistory parse_script(std::string_view text);

/// Canonical text form; `parse_script(serialize(h)) == h`.
std::string serialize(const GameHistory& h);

/// Replays the first `count` moves (all by default). Throws ScriptError on
/// an illegal script: wrong player order, reclaimed edge, bad vertex.
ColoredBoard replay(const GameHistory& h, std::size_t count = static_cast<std::size_t>(-1));

}  // namespace k4

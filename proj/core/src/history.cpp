#include "k4/history.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace k4 {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

GameHistory parse_script(std::string_view text) {
  GameHistory h;
  bool have_board = false;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto space = line.find_first_of(" \t");
    if (space == std::string_view::npos) {
      throw ScriptError(line_no, "expected '<keyword> <argument>', got '" +
                                     std::string(line) + "'");
    }
    const std::string_view head = line.substr(0, space);
    const std::string_view arg = trim(line.substr(space + 1));

    if (head == "board") {
      if (have_board || !h.moves.empty()) {
        throw ScriptError(line_no, "board header must appear once, before moves");
      }
      if (!parse_int(arg, h.board_size) || h.board_size < 1 ||
          h.board_size > kMaxVertices) {
        throw ScriptError(line_no, "invalid board size '" + std::string(arg) + "'");
      }
      have_board = true;
      continue;
    }

    Player who;
    if (head == "FP") {
      who = Player::First;
    } else if (head == "SP") {
      who = Player::Second;
    } else {
      throw ScriptError(line_no, "unknown keyword '" + std::string(head) + "'");
    }
    const auto dash = arg.find('-');
    int a = 0;
    int b = 0;
    if (dash == std::string_view::npos || !parse_int(trim(arg.substr(0, dash)), a) ||
        !parse_int(trim(arg.substr(dash + 1)), b)) {
      throw ScriptError(line_no, "malformed edge '" + std::string(arg) + "'");
    }
    if (a == b) {
      throw ScriptError(line_no, "self-loop " + std::string(arg));
    }
    if (a < 0 || b < 0 || a >= h.board_size || b >= h.board_size) {
      throw ScriptError(line_no, "vertex out of range in '" + std::string(arg) + "'");
    }
    h.moves.push_back({who, Edge(a, b)});
  }
  return h;
}

std::string serialize(const GameHistory& h) {
  std::ostringstream out;
  out << "board " << h.board_size << '\n';
  for (const Move& m : h.moves) {
    out << to_string(m.player) << ' ' << int(m.edge.u) << '-' << int(m.edge.v) << '\n';
  }
  return out.str();
}

ColoredBoard replay(const GameHistory& h, std::size_t count) {
  ColoredBoard board(h.board_size);
  const std::size_t limit = std::min(count, h.moves.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const Move& m = h.moves[i];
    const Player expected = i % 2 == 0 ? Player::First : Player::Second;
    if (m.player != expected) {
      throw ScriptError(0, "move " + std::to_string(i) + " should be played by " +
                               to_string(expected));
    }
    try {
      board.claim(m);
    } catch (const BoardError& e) {
      throw ScriptError(0, "move " + std::to_string(i) + ": " + e.what());
    }
  }
  return board;
}

}  // namespace k4

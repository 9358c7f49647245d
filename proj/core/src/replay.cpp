#include "k4/replay.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "k4/fixtures.hpp"
#include "k4/patterns.hpp"

namespace k4 {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ScriptError(0, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int parse_count(const std::string& tok, int line) {
  std::size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 0) throw ScriptError(line, "expected a move count, got '" + tok + "'");
  return v;
}

Edge parse_edge(const std::string& tok, int line) {
  const auto dash = tok.find('-');
  if (dash == std::string::npos) throw ScriptError(line, "malformed edge '" + tok + "'");
  const int a = parse_count(tok.substr(0, dash), line);
  const int b = parse_count(tok.substr(dash + 1), line);
  if (a == b) throw ScriptError(line, "self-loop " + tok);
  return Edge(a, b);
}

std::string edges_text(const std::vector<Edge>& es) {
  std::string s = "{";
  for (std::size_t i = 0; i < es.size(); ++i) s += (i ? ", " : "") + to_string(es[i]);
  return s + "}";
}

AssertionResult evaluate(const Assertion& a, const ColoredBoard& board,
                         const GameHistory& h) {
  AssertionResult r{a, false, {}};
  switch (a.kind) {
    case PredicateKind::SPDoubleThreat:
    case PredicateKind::FPDoubleThreat: {
      const Player p = a.kind == PredicateKind::SPDoubleThreat ? Player::Second : Player::First;
      const auto c = winning_completions(board, p);
      r.passed = c.size() >= 2;
      r.detail = std::string(to_string(p)) + " completions " + edges_text(c);
      break;
    }
    case PredicateKind::NoK4Either: {
      const auto f = find_k4(board, Player::First);
      const auto s = find_k4(board, Player::Second);
      r.passed = !f && !s;
      r.detail = r.passed ? "no K4" : (f ? "FP owns a K4" : "SP owns a K4");
      break;
    }
    case PredicateKind::MatchesFixture: {
      const auto emb = match_pattern(board, builtin_fixture(a.fixture));
      r.passed = emb.has_value();
      r.detail = r.passed ? "matched " + a.fixture : "no match for " + a.fixture;
      break;
    }
    case PredicateKind::SPCompletions: {
      auto want = a.edges;
      std::sort(want.begin(), want.end());
      const auto got = winning_completions(board, Player::Second);
      r.passed = got == want;
      r.detail = "SP completions " + edges_text(got) + ", expected " + edges_text(want);
      break;
    }
    case PredicateKind::ForcedBlock: {
      const Move& m = h.moves.at(static_cast<std::size_t>(a.after));
      const auto sp = winning_completions(board, Player::Second);
      const auto fp = winning_completions(board, Player::First);
      r.passed = m.player == Player::First && fp.empty() && sp.size() == 1 && sp[0] == m.edge;
      r.detail = "move " + std::to_string(a.after) + " " + to_string(m.edge) +
                 ", SP completions before it " + edges_text(sp);
      break;
    }
  }
  return r;
}

}  // namespace

std::string describe(const Assertion& a) {
  switch (a.kind) {
    case PredicateKind::SPDoubleThreat: return "after " + std::to_string(a.after) + " sp-double-threat";
    case PredicateKind::FPDoubleThreat: return "after " + std::to_string(a.after) + " fp-double-threat";
    case PredicateKind::NoK4Either: return a.after < 0 ? "always no-k4" : "after " + std::to_string(a.after) + " no-k4";
    case PredicateKind::MatchesFixture: return "after " + std::to_string(a.after) + " matches " + a.fixture;
    case PredicateKind::SPCompletions: return "after " + std::to_string(a.after) + " sp-completions " + edges_text(a.edges);
    case PredicateKind::ForcedBlock: return "forced " + std::to_string(a.after);
  }
  return "?";
}

ScriptFixture parse_fixture(std::string name, std::string_view script, std::string_view sidecar) {
  ScriptFixture f;
  f.name = std::move(name);
  f.history = parse_script(script);
  std::istringstream in{std::string(sidecar)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "names:") {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto eq = tok[i].find('=');
        if (eq == std::string::npos) throw ScriptError(line_no, "expected NAME=vertex");
        f.names.emplace_back(tok[i].substr(0, eq), parse_count(tok[i].substr(eq + 1), line_no));
      }
      continue;
    }
    Assertion a;
    a.line = line_no;
    std::size_t pred = 0;
    if (tok[0] == "always") {
      a.after = -1;
      pred = 1;
    } else if (tok[0] == "after" && tok.size() >= 3) {
      a.after = parse_count(tok[1], line_no);
      pred = 2;
    } else if (tok[0] == "forced" && tok.size() == 2) {
      a.kind = PredicateKind::ForcedBlock;
      a.after = parse_count(tok[1], line_no);
      if (a.after >= static_cast<int>(f.history.moves.size())) {
        throw ScriptError(line_no, "forced move index beyond the script");
      }
      f.assertions.push_back(a);
      continue;
    } else {
      throw ScriptError(line_no, "unknown assertion '" + line + "'");
    }
    if (pred >= tok.size()) throw ScriptError(line_no, "missing predicate");
    const std::string& p = tok[pred];
    if (p == "sp-double-threat") {
      a.kind = PredicateKind::SPDoubleThreat;
    } else if (p == "fp-double-threat") {
      a.kind = PredicateKind::FPDoubleThreat;
    } else if (p == "no-k4") {
      a.kind = PredicateKind::NoK4Either;
    } else if (p == "matches" && pred + 1 < tok.size()) {
      a.kind = PredicateKind::MatchesFixture;
      a.fixture = tok[pred + 1];
      try {
        builtin_fixture(a.fixture);  // reject unknown names early
      } catch (const FixtureError& e) {
        throw ScriptError(line_no, e.what());
      }
    } else if (p == "sp-completions") {
      a.kind = PredicateKind::SPCompletions;
      for (std::size_t i = pred + 1; i < tok.size(); ++i) a.edges.push_back(parse_edge(tok[i], line_no));
    } else {
      throw ScriptError(line_no, "unknown predicate '" + p + "'");
    }
    if (a.after > static_cast<int>(f.history.moves.size())) {
      throw ScriptError(line_no, "assertion after move " + std::to_string(a.after) +
                                     " but the script has " +
                                     std::to_string(f.history.moves.size()));
    }
    if (a.after < 0 && a.kind != PredicateKind::NoK4Either) {
      throw ScriptError(line_no, "only no-k4 may be asserted always");
    }
    f.assertions.push_back(a);
  }
  return f;
}

ScriptFixture load_fixture(const std::filesystem::path& script_path) {
  auto sidecar = script_path;
  sidecar.replace_extension(".assert");
  const std::string side = std::filesystem::exists(sidecar) ? read_file(sidecar) : std::string{};
  return parse_fixture(script_path.stem().string(), read_file(script_path), side);
}

FixtureRun run_fixture(const ScriptFixture& f) {
  FixtureRun run;
  const std::size_t total = f.history.moves.size();
  replay(f.history);  // legality first; throws ScriptError

  std::vector<ColoredBoard> boards;
  boards.reserve(total + 1);
  boards.push_back(ColoredBoard(f.history.board_size));
  for (const Move& m : f.history.moves) boards.push_back(boards.back().claimed(m));

  for (const Assertion& a : f.assertions) {
    AssertionResult r;
    if (a.after < 0) {
      r = {a, true, "checked after each of " + std::to_string(total) + " moves"};
      for (std::size_t k = 0; k <= total && r.passed; ++k) {
        AssertionResult step = evaluate(a, boards[k], f.history);
        if (!step.passed) r = {a, false, "after move " + std::to_string(k) + ": " + step.detail};
      }
    } else {
      r = evaluate(a, boards[static_cast<std::size_t>(a.after)], f.history);
    }
    if (!r.passed && run.passed) {
      run.passed = false;
      run.first_failure = static_cast<int>(run.results.size());
    }
    run.results.push_back(std::move(r));
  }
  return run;
}

}  // namespace k4

#include "k4/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace k4 {

extern const char* const kBuiltinFixtureText;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

void validate(const PatternFixture& f) {
  std::vector<std::pair<int, int>> seen;
  for (const auto* list : {&f.fp_edges, &f.sp_edges, &f.unclaimed_required, &f.optional_sp_edges}) {
    for (auto [a, b] : *list) {
      if (a == b) throw FixtureError(f.name + ": self-loop");
      const std::pair<int, int> key = std::minmax(a, b);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        throw FixtureError(f.name + ": edge " + f.vertices[a] + "-" + f.vertices[b] +
                           " listed twice");
      }
      seen.emplace_back(key);
    }
  }
}

class Matcher {
 public:
  Matcher(const ColoredBoard& board, const PatternFixture& f) : board_(board), f_(f) {
    const int k = static_cast<int>(f.vertices.size());
    want_.assign(static_cast<std::size_t>(k * k), Want::Unclaimed);
    auto put = [&](const std::vector<PatternFixture::NamedEdge>& es, Want w) {
      for (auto [a, b] : es) {
        want_[a * k + b] = w;
        want_[b * k + a] = w;
      }
    };
    put(f.fp_edges, Want::First);
    put(f.sp_edges, Want::Second);
    put(f.optional_sp_edges, Want::SecondOrUnclaimed);
    fp_deg_.assign(k, 0);
    sp_deg_.assign(k, 0);
    for (auto [a, b] : f.fp_edges) ++fp_deg_[a], ++fp_deg_[b];
    for (auto [a, b] : f.sp_edges) ++sp_deg_[a], ++sp_deg_[b];
  }

  bool run(const std::function<bool(const Embedding&)>& visit) {
    const int k = static_cast<int>(f_.vertices.size());
    if (f_.mode == MatchMode::Exact) {
      const int edges = static_cast<int>(f_.fp_edges.size() + f_.sp_edges.size());
      if (board_.ply() != edges || popcount(board_.touched()) != k) return false;
    }
    visit_ = &visit;
    image_.assign(k, -1);
    return extend(0);
  }

 private:
  enum class Want : std::uint8_t { Unclaimed, First, Second, SecondOrUnclaimed };

  bool fits(Want w, EdgeState s) const {
    switch (w) {
      case Want::Unclaimed: return s == EdgeState::Unclaimed;
      case Want::First: return s == EdgeState::First;
      case Want::Second: return s == EdgeState::Second;
      case Want::SecondOrUnclaimed: return s != EdgeState::First;
    }
    return false;
  }

  bool extend(int i) {
    const int k = static_cast<int>(f_.vertices.size());
    if (i == k) return (*visit_)(image_);
    VertexMask used = 0;
    for (int j = 0; j < i; ++j) used |= bit(image_[j]);
    VertexMask cand = board_.all_vertices() & ~used;
    if (f_.mode == MatchMode::Exact) cand &= board_.touched();
    while (cand != 0) {
      const Vertex v = lowest(cand);
      cand &= cand - 1;
      if (board_.degree(v, Player::First) < fp_deg_[i] ||
          board_.degree(v, Player::Second) < sp_deg_[i]) {
        continue;
      }
      if (f_.mode == MatchMode::Exact && (board_.degree(v, Player::First) != fp_deg_[i] ||
                                          board_.degree(v, Player::Second) != sp_deg_[i])) {
        continue;
      }
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) {
        ok = fits(want_[i * k + j], board_.at(v, image_[j]));
      }
      if (!ok) continue;
      image_[i] = v;
      if (extend(i + 1)) return true;
    }
    image_[i] = -1;
    return false;
  }

  const ColoredBoard& board_;
  const PatternFixture& f_;
  std::vector<Want> want_;
  std::vector<int> fp_deg_;
  std::vector<int> sp_deg_;
  Embedding image_;
  const std::function<bool(const Embedding&)>* visit_ = nullptr;
};

}  // namespace

int PatternFixture::index_of(std::string_view vertex) const {
  const auto it = std::find(vertices.begin(), vertices.end(), vertex);
  if (it == vertices.end()) return -1;
  return static_cast<int>(it - vertices.begin());
}

std::vector<PatternFixture> parse_fixtures(std::string_view text) {
  std::vector<PatternFixture> out;
  PatternFixture* cur = nullptr;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "fixtures line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw FixtureError(where + "unterminated section header");
      out.emplace_back();
      cur = &out.back();
      cur->name = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    if (cur == nullptr) throw FixtureError(where + "field outside a section");
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw FixtureError(where + "expected 'key: value'");
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));

    if (key == "match") {
      if (value == "induced") {
        cur->mode = MatchMode::Induced;
      } else if (value == "exact") {
        cur->mode = MatchMode::Exact;
      } else {
        throw FixtureError(where + "unknown match mode '" + std::string(value) + "'");
      }
      continue;
    }
    if (key == "vertices") {
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto sp = rest.find(' ');
        cur->vertices.emplace_back(rest.substr(0, sp));
        rest = trim(sp == std::string_view::npos ? std::string_view{} : rest.substr(sp));
      }
      continue;
    }
    std::vector<PatternFixture::NamedEdge>* target = nullptr;
    if (key == "fp") target = &cur->fp_edges;
    if (key == "sp") target = &cur->sp_edges;
    if (key == "vulnerable") target = &cur->unclaimed_required;
    if (key == "optional_sp") target = &cur->optional_sp_edges;
    if (target == nullptr) throw FixtureError(where + "unknown key '" + std::string(key) + "'");
    if (value.empty()) continue;
    for (std::string_view item : split(value, ',')) {
      const auto dash = item.find('-');
      if (dash == std::string_view::npos) {
        throw FixtureError(where + "malformed edge '" + std::string(item) + "'");
      }
      const int a = cur->index_of(trim(item.substr(0, dash)));
      const int b = cur->index_of(trim(item.substr(dash + 1)));
      if (a < 0 || b < 0) {
        throw FixtureError(where + "edge '" + std::string(item) + "' uses an unlisted vertex");
      }
      target->emplace_back(a, b);
    }
  }
  for (const auto& f : out) validate(f);
  return out;
}

const std::vector<PatternFixture>& builtin_fixtures() {
  static const std::vector<PatternFixture> fixtures = parse_fixtures(kBuiltinFixtureText);
  return fixtures;
}

const PatternFixture& builtin_fixture(std::string_view name) {
  for (const auto& f : builtin_fixtures()) {
    if (f.name == name) return f;
  }
  throw FixtureError("no built-in fixture named '" + std::string(name) + "'");
}

bool for_each_match(const ColoredBoard& board, const PatternFixture& fixture,
                    const std::function<bool(const Embedding&)>& visit) {
  return Matcher(board, fixture).run(visit);
}

std::optional<Embedding> match_pattern(const ColoredBoard& board, const PatternFixture& fixture) {
  std::optional<Embedding> found;
  for_each_match(board, fixture, [&](const Embedding& e) {
    found = e;
    return true;
  });
  return found;
}

ColoredBoard embed_fixture(const PatternFixture& fixture, int n,
                           const std::vector<Vertex>& placement, bool claim_optional) {
  ColoredBoard board(n);
  auto at = [&](int i) { return placement.empty() ? i : placement[i]; };
  for (auto [a, b] : fixture.fp_edges) board.claim({Player::First, Edge(at(a), at(b))});
  for (auto [a, b] : fixture.sp_edges) board.claim({Player::Second, Edge(at(a), at(b))});
  if (claim_optional) {
    for (auto [a, b] : fixture.optional_sp_edges) {
      board.claim({Player::Second, Edge(at(a), at(b))});
    }
  }
  return board;
}

}  // namespace k4

#include "k4/strategy.hpp"

#include <algorithm>
#include <sstream>

#include "k4/patterns.hpp"

namespace k4 {

namespace {

constexpr Player FP = Player::First;
constexpr Player SP = Player::Second;

constexpr const char* kLabelNames[kLabelCount] = {
    "a",  "b",  "c",  "g",  "m",  "n",  "l",  "r",  "p0", "p1", "p2", "p3", "p4",  "k3u",
    "k3s1", "k3s2", "f1", "f2", "q0", "q1", "q2", "q3", "q4", "q5", "q6"};

constexpr const char* kStageNames[] = {"S1", "S2", "S3", "S4", "S5", "S6", "ForcedPlan", "Finished"};

[[noreturn]] void violation(const StrategyState& s, const std::string& what) {
  throw StrategyViolation(std::string(to_string(s.stage)) + ": " + what);
}

StrategyDecision decide(Edge e, DecisionReason why, StrategyState next) {
  ++next.fp_move_count;
  return {e, why, next};
}

StrategyDecision play(const ColoredBoard& board, Vertex x, Vertex y, StrategyState next,
                      DecisionReason why = DecisionReason::StagePlay) {
  const Edge e(x, y);
  if (x == y || !board.is_unclaimed(e)) {
    violation(next, "scripted edge " + to_string(e) + " is not available");
  }
  return decide(e, why, next);
}

bool unclaimed(const ColoredBoard& b, Vertex x, Vertex y) { return b.is_unclaimed(Edge(x, y)); }
bool sp_owns(const ColoredBoard& b, Vertex x, Vertex y) { return b.owns(SP, x, y); }

/// Least vertex by (S-degree, index) among `vs`.
Vertex min_sdeg(const ColoredBoard& b, const std::vector<Vertex>& vs) {
  return *std::min_element(vs.begin(), vs.end(), [&](Vertex x, Vertex y) {
    const int dx = b.degree(x, SP), dy = b.degree(y, SP);
    return dx != dy ? dx < dy : x < y;
  });
}

bool in_sp_triangle(const ColoredBoard& b, Vertex v) {
  const VertexMask nb = b.neighbours(SP, v);
  bool found = false;
  for_each_bit(nb, [&](Vertex u) { found = found || (b.neighbours(SP, u) & nb) != 0; });
  return found;
}

void clear_k3(StrategyState& s) {
  s.clear(Label::K3U);
  s.clear(Label::K3S1);
  s.clear(Label::K3S2);
}

void clear_plan(StrategyState& s) {
  s.plan_type = 0;
  s.plan_step = 0;
  for (int i = 0; i < 7; ++i) s.clear(static_cast<Label>(static_cast<int>(Label::Q0) + i));
}

std::array<Vertex, 5> p_array(const StrategyState& s) {
  std::array<Vertex, 5> P{};
  for (int i = 0; i < 5; ++i) P[i] = s.p(i);
  return P;
}

// ---- Stage 3 -------------------------------------------------------------

StrategyDecision stage4(const ColoredBoard& board, const StrategyState& state);

/// Next p_i: claim m p_i (S3) or c p_i (S5/S6) for a fresh p_i.
StrategyDecision new_spoke(const ColoredBoard& board, StrategyState next, Vertex hub) {
  if (next.p_count >= 5) violation(next, "all five p_i already chosen");
  const Vertex p = board.fresh_vertex();
  next.set_p(next.p_count, p);
  ++next.p_count;
  return play(board, hub, p, next);
}

StrategyDecision stage3(const ColoredBoard& board, const StrategyState& state) {
  StrategyState next = state;
  if (state.step == 0) {
    // Roles on first entry. M/N/L/R hold the quad (sorted) until now.
    std::array<Vertex, 4> q{state.get(Label::M), state.get(Label::N), state.get(Label::L),
                            state.get(Label::R)};
    int sp_edges = 0;
    Edge lr;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const EdgeState es = board.at(q[i], q[j]);
        if (es == EdgeState::Second) {
          ++sp_edges;
          lr = Edge(q[i], q[j]);
        } else if (es != EdgeState::First) {
          violation(state, "K4- pair " + to_string(Edge(q[i], q[j])) + " is unclaimed");
        }
      }
    }
    if (sp_edges != 1) violation(state, "K4- does not carry exactly one SP edge");
    std::vector<Vertex> rest;
    for (Vertex v : q) {
      if (!lr.touches(v)) rest.push_back(v);
    }
    const bool t0 = in_sp_triangle(board, rest[0]);
    const bool t1 = in_sp_triangle(board, rest[1]);
    Vertex m;
    if (t0 != t1) {
      m = t0 ? rest[0] : rest[1];
    } else {
      const int d0 = board.degree(rest[0], SP), d1 = board.degree(rest[1], SP);
      m = d1 > d0 ? rest[1] : rest[0];
    }
    next.set(Label::M, m);
    next.set(Label::N, m == rest[0] ? rest[1] : rest[0]);
    next.set(Label::L, lr.u);
    next.set(Label::R, lr.v);
    next.step = 1;
    return new_spoke(board, next, m);
  }

  const Vertex m = state.get(Label::M), n = state.get(Label::N);
  const Vertex l = state.get(Label::L), r = state.get(Label::R);
  if (state.p_count == 0) return new_spoke(board, next, m);
  const Vertex p = state.p(state.p_count - 1);
  const EdgeState pn = board.at(p, n), pl = board.at(p, l), pr = board.at(p, r);
  const bool settled = pn == EdgeState::Second ||
                       (pl != EdgeState::Unclaimed && pr != EdgeState::Unclaimed);
  if (settled) {
    if (state.p_count < 5) return new_spoke(board, next, m);
    next.stage = Stage::S4;
    next.step = 0;
    return stage4(board, next);
  }
  if (pl == EdgeState::Second && pr == EdgeState::Unclaimed) return play(board, p, r, next);
  if (pr == EdgeState::Second && pl == EdgeState::Unclaimed) return play(board, p, l, next);
  if (pn == EdgeState::Unclaimed && pl == EdgeState::Unclaimed && pr == EdgeState::Unclaimed) {
    return play(board, p, n, next);
  }
  violation(state, "no p_i rule applies to " + std::to_string(p));
}

StrategyDecision stage4(const ColoredBoard& board, const StrategyState& state) {
  return modified_k3_move(board, state, p_array(state));
}

// ---- Stage 2 -------------------------------------------------------------

StrategyDecision stage6(const ColoredBoard& board, const StrategyState& state);
StrategyDecision stage5(const ColoredBoard& board, const StrategyState& state);

StrategyDecision stage2(const ColoredBoard& board, const StrategyState& state) {
  for (int i = 1; i <= 4; ++i) {
    const auto& f = builtin_fixture("stage5-case-" + std::to_string(i));
    if (auto emb = match_pattern(board, f)) {
      StrategyState next = state;
      next.stage = Stage::S5;
      next.step = 0;
      next.set(Label::A, (*emb)[f.index_of("a")]);
      next.set(Label::B, (*emb)[f.index_of("b")]);
      next.set(Label::C, (*emb)[f.index_of("c")]);
      next.clear(Label::G);
      next.set_p(0, (*emb)[f.index_of("p0")]);
      next.p_count = 1;
      return stage5(board, next);
    }
  }
  for (int i = 1; i <= 2; ++i) {
    const auto& f = builtin_fixture("stage6-case-" + std::to_string(i));
    if (auto emb = match_pattern(board, f)) {
      // The vertex of F-degree three carries p0, so it is the hub c here.
      StrategyState next = state;
      next.stage = Stage::S6;
      next.step = 0;
      const Vertex x = (*emb)[f.index_of("b")], y = (*emb)[f.index_of("c")];
      next.set(Label::C, (*emb)[f.index_of("a")]);
      next.set(Label::A, std::min(x, y));
      next.set(Label::B, std::max(x, y));
      next.clear(Label::G);
      next.set_p(0, (*emb)[f.index_of("p0")]);
      next.p_count = 1;
      return stage6(board, next);
    }
  }

  // Least edge that leaves a first-player K4- (sixth edge free or SP).
  for (Edge e : board.unclaimed_edges()) {
    const VertexMask nu = board.neighbours(FP, e.u), nv = board.neighbours(FP, e.v);
    // Quads {e.u, e.v, x, y}: after claiming e, five of six pairs must be FP.
    std::optional<std::array<Vertex, 4>> quad;
    // Both other corners need an FP edge to e.u or e.v.
    const VertexMask cand = (nu | nv) & ~bit(e.u) & ~bit(e.v);
    for (Vertex x = 0; x < board.size() && !quad; ++x) {
      if (!((cand >> x) & 1U)) continue;
      for (Vertex y = x + 1; y < board.size() && !quad; ++y) {
        if (!((cand >> y) & 1U)) continue;
        int fp = 1;  // e itself
        fp += (nu >> x) & 1U;
        fp += (nu >> y) & 1U;
        fp += (nv >> x) & 1U;
        fp += (nv >> y) & 1U;
        fp += board.owns(FP, x, y) ? 1 : 0;
        if (fp == 5) {
          std::array<Vertex, 4> q{e.u, e.v, x, y};
          std::sort(q.begin(), q.end());
          quad = q;
        }
      }
    }
    if (quad) {
      StrategyState next = state;
      next.stage = Stage::S3;
      next.step = 0;
      next.set(Label::M, (*quad)[0]);
      next.set(Label::N, (*quad)[1]);
      next.set(Label::L, (*quad)[2]);
      next.set(Label::R, (*quad)[3]);
      return play(board, e.u, e.v, next);
    }
  }

  const std::array<Vertex, 3> tri{state.get(Label::A), state.get(Label::B), state.get(Label::C)};
  Vertex c = tri[0];
  for (Vertex v : tri) {
    const int dv = board.degree(v, SP), dc = board.degree(c, SP);
    if (dv > dc || (dv == dc && v < c)) c = v;
  }
  std::vector<Vertex> ab;
  for (Vertex v : tri) {
    if (v != c) ab.push_back(v);
  }
  StrategyState next = state;
  next.set(Label::A, ab[0]);
  next.set(Label::B, ab[1]);
  next.set(Label::C, c);
  const Vertex g = board.fresh_vertex();
  next.set(Label::G, g);
  return play(board, c, g, next);
}

// ---- Stage 5 -------------------------------------------------------------

StrategyDecision enter_stage3_from_5(const ColoredBoard& board, StrategyState next, Vertex pk) {
  const Vertex a = next.get(Label::A), b = next.get(Label::B), c = next.get(Label::C);
  next.stage = Stage::S3;
  next.step = 1;
  next.set(Label::M, c);
  next.set(Label::N, a);
  next.set(Label::L, std::min(b, pk));
  next.set(Label::R, std::max(b, pk));
  next.clear(Label::A);
  next.clear(Label::B);
  next.clear(Label::C);
  // p_k becomes r or l; keep only the earlier spokes.
  next.set_p(next.p_count - 1, -1);
  --next.p_count;
  return play(board, a, pk, next);
}

StrategyDecision stage5(const ColoredBoard& board, const StrategyState& state) {
  StrategyState next = state;
  const Vertex a = state.get(Label::A), b = state.get(Label::B), c = state.get(Label::C);
  switch (state.step) {
    case 0:
      next.step = 1;
      return new_spoke(board, next, c);
    case 1: {
      const Vertex p1 = state.p(1);
      if (!sp_owns(board, a, p1) && !sp_owns(board, b, p1)) {
        return enter_stage3_from_5(board, next, p1);
      }
      next.step = 2;
      return new_spoke(board, next, c);
    }
    case 2: {
      const Vertex p1 = state.p(1), p2 = state.p(2);
      if (!sp_owns(board, a, p2) && !sp_owns(board, b, p2) && !sp_owns(board, p1, p2)) {
        return enter_stage3_from_5(board, next, p2);
      }
      next.stage = Stage::S6;
      next.step = 0;
      return new_spoke(board, next, c);
    }
    default:
      violation(state, "stage 5 step out of range");
  }
}

// ---- Stage 6 and the forced plan -----------------------------------------

StrategyDecision forced_step(const ColoredBoard& board, const StrategyState& state);

StrategyDecision stage6(const ColoredBoard& board, const StrategyState& state) {
  if (state.mk3_step > 0) return modified_k3_move(board, state, p_array(state));

  if (auto found = find_promising(board)) {
    StrategyState next = state;
    next.stage = Stage::ForcedPlan;
    next.plan_type = static_cast<std::uint8_t>(found->type);
    next.plan_step = 0;
    for (std::size_t i = 0; i < found->embedding.size(); ++i) {
      next.set(static_cast<Label>(static_cast<int>(Label::Q0) + static_cast<int>(i)),
               found->embedding[i]);
    }
    return forced_step(board, next);
  }

  if (state.p_count == 5) {
    bool independent = true;
    for (int i = 0; i < 5 && independent; ++i) {
      for (int j = i + 1; j < 5 && independent; ++j) {
        independent = unclaimed(board, state.p(i), state.p(j));
      }
    }
    if (independent) return modified_k3_move(board, state, p_array(state));
  }
  if (state.p_count < 5) return new_spoke(board, state, state.get(Label::C));
  violation(state, "no checklist item applies");
}

Embedding plan_embedding(const StrategyState& s) {
  const int k = s.plan_type <= 2 ? 5 : (s.plan_type <= 4 ? 6 : 7);
  Embedding e(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) e[i] = s.get(static_cast<Label>(static_cast<int>(Label::Q0) + i));
  return e;
}

StrategyDecision forced_step(const ColoredBoard& board, const StrategyState& state) {
  const auto plan = promising_plan(plan_embedding(state), state.plan_type);
  if (state.plan_step < plan.size()) {
    const Edge e = plan[state.plan_step].edge;
    if (board.is_unclaimed(e) &&
        completion_count(board.claimed({FP, e}), FP, 1) > 0) {
      StrategyState next = state;
      ++next.plan_step;
      return decide(e, DecisionReason::ForcedPlanStep, next);
    }
  }
  // The line no longer applies; go back to the checklist.
  StrategyState next = state;
  clear_plan(next);
  next.stage = Stage::S6;
  return stage6(board, next);
}

}  // namespace

// ---- public API ------------------------------------------------------------

const char* to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }
const char* to_string(Label l) { return kLabelNames[static_cast<int>(l)]; }

const char* to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::CompleteK4: return "CompleteK4";
    case DecisionReason::BlockThreat: return "BlockThreat";
    case DecisionReason::StagePlay: return "StagePlay";
    case DecisionReason::ForcedPlanStep: return "ForcedPlanStep";
  }
  return "?";
}

Vertex StrategyState::get(Label l) const {
  const int v = labels[static_cast<int>(l)];
  if (v < 0) {
    throw StrategyViolation(std::string(k4::to_string(stage)) + ": label " + k4::to_string(l) +
                            " is undefined");
  }
  return v;
}

std::string StrategyState::to_text() const {
  std::ostringstream os;
  os << "stage=" << k4::to_string(stage) << " step=" << int(step) << " p=" << int(p_count)
     << " mk3=" << int(mk3_step) << " plan=" << int(plan_type) << '/' << int(plan_step)
     << " moves=" << int(fp_move_count);
  for (int i = 0; i < kLabelCount; ++i) {
    if (labels[i] >= 0) os << ' ' << kLabelNames[i] << '=' << int(labels[i]);
  }
  return os.str();
}

StrategyState StrategyState::from_text(std::string_view text) {
  StrategyState s;
  std::istringstream is{std::string(text)};
  std::string tok;
  auto number = [](const std::string& v) {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size() || x < 0 || x > 127) throw std::invalid_argument("bad number " + v);
    return x;
  };
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got " + tok);
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "stage") {
      const auto it = std::find_if(std::begin(kStageNames), std::end(kStageNames),
                                   [&](const char* n) { return val == n; });
      if (it == std::end(kStageNames)) throw std::invalid_argument("unknown stage " + val);
      s.stage = static_cast<Stage>(it - std::begin(kStageNames));
    } else if (key == "step") {
      s.step = static_cast<std::uint8_t>(number(val));
    } else if (key == "p") {
      s.p_count = static_cast<std::uint8_t>(number(val));
    } else if (key == "mk3") {
      s.mk3_step = static_cast<std::uint8_t>(number(val));
    } else if (key == "moves") {
      s.fp_move_count = static_cast<std::uint8_t>(number(val));
    } else if (key == "plan") {
      const auto slash = val.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("plan needs type/step");
      s.plan_type = static_cast<std::uint8_t>(number(val.substr(0, slash)));
      s.plan_step = static_cast<std::uint8_t>(number(val.substr(slash + 1)));
    } else {
      const auto it = std::find_if(std::begin(kLabelNames), std::end(kLabelNames),
                                   [&](const char* n) { return key == n; });
      if (it == std::end(kLabelNames)) throw std::invalid_argument("unknown label " + key);
      s.labels[it - std::begin(kLabelNames)] = static_cast<std::int8_t>(number(val));
    }
  }
  return s;
}

std::optional<StrategyDecision> standing_assumption(const ColoredBoard& board,
                                                    const StrategyState& state) {
  if (auto win = first_completion(board, FP)) {
    StrategyState next = state;
    next.stage = Stage::Finished;
    return decide(*win, DecisionReason::CompleteK4, next);
  }
  if (auto block = first_completion(board, SP)) {
    return decide(*block, DecisionReason::BlockThreat, state);
  }
  return std::nullopt;
}

StrategyDecision k3_move(const ColoredBoard& board, const StrategyState& state) {
  StrategyState next = state;
  switch (state.step) {
    case 0: {
      const Vertex a = board.fresh_vertex();
      const Vertex b = board.fresh_vertex_excluding(bit(a));
      next.set(Label::A, a);
      next.set(Label::B, b);
      next.step = 1;
      return play(board, a, b, next);
    }
    case 1: {
      const auto sp = board.edges_of(SP);
      if (sp.empty()) violation(state, "second player has not moved");
      const Edge first = sp.front();
      next.set(Label::K3S1, first.u);
      next.set(Label::K3S2, first.v);
      Vertex a = state.get(Label::A), b = state.get(Label::B);
      if (first.touches(a)) std::swap(a, b);
      next.set(Label::A, a);
      next.set(Label::B, b);
      const Vertex c = board.fresh_vertex();
      next.set(Label::C, c);
      next.step = 2;
      return play(board, b, c, next);
    }
    case 2: {
      const Vertex a = state.get(Label::A), b = state.get(Label::B), c = state.get(Label::C);
      if (unclaimed(board, a, c)) {
        std::array<Vertex, 3> t{a, b, c};
        std::sort(t.begin(), t.end());
        next.set(Label::A, t[0]);
        next.set(Label::B, t[1]);
        next.set(Label::C, t[2]);
        clear_k3(next);
        next.stage = Stage::S2;
        next.step = 0;
        return play(board, a, c, next);
      }
      const Edge first(state.get(Label::K3S1), state.get(Label::K3S2));
      const Vertex u = (!first.touches(a) && !first.touches(b)) ? first.u : board.fresh_vertex();
      next.set(Label::K3U, u);
      next.step = 3;
      return play(board, b, u, next);
    }
    case 3: {
      const Vertex a = state.get(Label::A), b = state.get(Label::B), c = state.get(Label::C);
      const Vertex u = state.get(Label::K3U);
      Vertex x;
      if (unclaimed(board, a, u)) {
        x = a;
      } else if (unclaimed(board, c, u)) {
        x = c;
      } else {
        violation(state, "both au and cu are claimed");
      }
      std::array<Vertex, 3> t{x, b, u};
      std::sort(t.begin(), t.end());
      next.set(Label::A, t[0]);
      next.set(Label::B, t[1]);
      next.set(Label::C, t[2]);
      clear_k3(next);
      next.stage = Stage::S2;
      next.step = 0;
      return play(board, x, u, next);
    }
    default:
      violation(state, "K3 script has only four turns");
  }
}

StrategyDecision modified_k3_move(const ColoredBoard& board, const StrategyState& state,
                                  const std::array<Vertex, 5>& P) {
  StrategyState next = state;
  ++next.mk3_step;
  auto sdeg_less = [&](Vertex x, Vertex y) {
    const int dx = board.degree(x, SP), dy = board.degree(y, SP);
    return dx != dy ? dx < dy : x < y;
  };

  // A closing edge for a triangle inside P always wins together with the hub.
  auto closing_edge = [&]() -> std::optional<Edge> {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) {
        if (!unclaimed(board, P[i], P[j])) continue;
        for (int k = 0; k < 5; ++k) {
          if (k != i && k != j && board.owns(FP, P[i], P[k]) && board.owns(FP, P[j], P[k])) {
            return Edge(P[i], P[j]);
          }
        }
      }
    }
    return std::nullopt;
  };

  // Edge inside P leaving the first player two completing edges.
  auto fork_edge = [&]() -> std::optional<Edge> {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) {
        if (!unclaimed(board, P[i], P[j])) continue;
        const ColoredBoard after = board.claimed({FP, Edge(P[i], P[j])});
        if (completion_count(after, FP, 2) >= 2) return Edge(P[i], P[j]);
      }
    }
    return std::nullopt;
  };

  switch (state.mk3_step) {
    case 0: {
      for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
          if (board.owns(FP, P[i], P[j])) violation(state, "P already holds an FP edge");
        }
      }
      std::array<Vertex, 5> ranked = P;
      std::sort(ranked.begin(), ranked.end(), sdeg_less);
      for (int j = 1; j < 5; ++j) {
        for (int i = 0; i < j; ++i) {
          if (unclaimed(board, ranked[i], ranked[j])) {
            next.set(Label::F1, std::min(ranked[i], ranked[j]));
            next.set(Label::F2, std::max(ranked[i], ranked[j]));
            return play(board, ranked[i], ranked[j], next);
          }
        }
      }
      violation(state, "every pair inside P is claimed");
    }
    case 1: {
      const Vertex f1 = state.get(Label::F1), f2 = state.get(Label::F2);
      std::vector<Vertex> rest;
      for (Vertex v : P) {
        if (v != f1 && v != f2) rest.push_back(v);
      }
      std::sort(rest.begin(), rest.end(), sdeg_less);
      const auto& last = board.last_move();
      const std::optional<Edge> e =
          last && last->player == SP ? std::optional<Edge>(last->edge) : std::nullopt;
      auto in_P = [&](Vertex v) { return std::find(P.begin(), P.end(), v) != P.end(); };
      auto fresh_in_P = [&](Vertex v) {
        for (Vertex w : P) {
          if (w != v && !unclaimed(board, v, w)) return false;
        }
        return true;
      };

      // SP's reply touches f: stay on that endpoint.
      if (e && (e->touches(f1) || e->touches(f2))) {
        const Vertex x = e->touches(f1) ? f1 : f2;
        for (Vertex y : rest) {
          if (fresh_in_P(y) && unclaimed(board, x, y)) return play(board, x, y, next);
        }
      }
      // SP's reply lies inside P away from f.
      if (e && in_P(e->u) && in_P(e->v) && !e->touches(f1) && !e->touches(f2)) {
        const Vertex x = min_sdeg(board, {f1, f2});
        const Vertex y = min_sdeg(board, {e->u, e->v});
        if (unclaimed(board, x, y)) return play(board, x, y, next);
      }
      const int d0 = board.degree(rest[0], SP);
      const bool all_equal = std::all_of(rest.begin(), rest.end(),
                                         [&](Vertex v) { return board.degree(v, SP) == d0; });
      if (!all_equal) {
        for (Vertex y : rest) {
          if (e && e->touches(y)) continue;
          for (Vertex x : {f1, f2}) {
            if (unclaimed(board, x, y)) return play(board, x, y, next);
          }
        }
      } else {
        // Prefer vertices claimed-adjacent to l and r when those are named.
        std::vector<Vertex> order(rest.begin(), rest.end());
        auto lr_hits = [&](Vertex v) {
          int h = 0;
          for (Label lab : {Label::L, Label::R}) {
            if (state.has(lab) && !unclaimed(board, v, state.get(lab))) ++h;
          }
          return h;
        };
        std::stable_sort(order.begin(), order.end(), [&](Vertex x, Vertex y) {
          const int hx = lr_hits(x), hy = lr_hits(y);
          return hx != hy ? hx > hy : x < y;
        });
        for (Vertex y : order) {
          for (Vertex x : {f1, f2}) {
            if (unclaimed(board, x, y)) return play(board, x, y, next);
          }
        }
      }
      violation(state, "no second edge for the modified K3 script");
    }
    case 2: {
      if (auto close = closing_edge()) return play(board, close->u, close->v, next);
      std::array<int, 5> deg{};
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          if (i != j && board.owns(FP, P[i], P[j])) ++deg[i];
        }
      }
      Vertex v = -1;
      std::vector<Vertex> ones, zeros;
      for (int i = 0; i < 5; ++i) {
        if (deg[i] == 2) v = P[i];
        if (deg[i] == 1) ones.push_back(P[i]);
        if (deg[i] == 0) zeros.push_back(P[i]);
      }
      if (v < 0 || ones.size() != 2 || zeros.size() != 2) {
        // A forced block landed inside P; any double threat serves.
        if (auto fork = fork_edge()) return play(board, fork->u, fork->v, next);
        violation(state, "FP graph on P is not a path of length two");
      }
      std::sort(zeros.begin(), zeros.end());
      for (Vertex x : zeros) {
        if (unclaimed(board, x, v) && unclaimed(board, x, ones[0]) &&
            unclaimed(board, x, ones[1])) {
          return play(board, x, v, next);
        }
      }
      violation(state, "no vertex x with xv, xu, xw all unclaimed");
    }
    default: {
      if (auto close = closing_edge()) return play(board, close->u, close->v, next);
      if (auto fork = fork_edge()) return play(board, fork->u, fork->v, next);
      violation(state, "no triangle on P can be closed");
    }
  }
}

StrategyDecision fp_move(const ColoredBoard& board, const StrategyState& state) {
  if (board.to_move() != FP) violation(state, "it is not the first player's turn");
  if (auto d = standing_assumption(board, state)) return *d;
  switch (state.stage) {
    case Stage::S1: return k3_move(board, state);
    case Stage::S2: return stage2(board, state);
    case Stage::S3: return stage3(board, state);
    case Stage::S4: return stage4(board, state);
    case Stage::S5: return stage5(board, state);
    case Stage::S6: return stage6(board, state);
    case Stage::ForcedPlan: return forced_step(board, state);
    case Stage::Finished: break;
  }
  violation(state, "game is already decided");
}

std::vector<PlannedMove> promising_plan(const Embedding& emb, int type) {
  // Lines over fixture indices a..g = 0..6; each pair is (FP move, SP block).
  struct Step {
    int x, y, bx, by;
  };
  static const std::vector<Step> lines[7] = {
      {},
      {{2, 4, -1, -1}},
      {{2, 3, 1, 3}, {2, 4, -1, -1}},
      {{2, 5, 1, 5}, {5, 4, 2, 4}, {5, 3, -1, -1}},
      {{2, 4, 1, 4}, {2, 5, 1, 5}, {2, 3, -1, -1}},
      {{2, 6, 1, 6}, {6, 3, 2, 3}, {6, 5, 2, 5}, {6, 4, -1, -1}},
      {{2, 6, 1, 6}, {6, 5, 2, 5}, {6, 4, 4, 5}, {6, 3, -1, -1}},
  };
  if (type < 1 || type > 6) throw std::invalid_argument("promising type must be 1..6");
  std::vector<PlannedMove> out;
  for (const Step& s : lines[type]) {
    PlannedMove pm{Edge(emb.at(s.x), emb.at(s.y)), std::nullopt};
    if (s.bx >= 0) pm.expected_reply = Edge(emb.at(s.bx), emb.at(s.by));
    out.push_back(pm);
  }
  return out;
}

bool lemma_precondition(const ColoredBoard& board, const PatternFixture& fixture,
                        const Embedding& embedding) {
  ColoredBoard probe = board;
  for (auto [i, j] : fixture.unclaimed_required) {
    probe.claim({SP, Edge(embedding[i], embedding[j])});
  }
  return !has_k4(probe, SP) && !has_k4(probe, FP) && completion_count(probe, SP, 1) == 0;
}

std::optional<PromisingMatch> find_promising(const ColoredBoard& board) {
  for (int t = 1; t <= 6; ++t) {
    const auto& f = builtin_fixture("promising-" + std::to_string(t));
    std::optional<PromisingMatch> hit;
    for_each_match(board, f, [&](const Embedding& e) {
      if (!lemma_precondition(board, f, e)) return false;
      hit = PromisingMatch{t, e};
      return true;
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

}  // namespace k4

// Acceptance run: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the named ones.
//
//   acceptance [k3] [promising] [regressions] [theorem] [oracle] [canon] [invariants]

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>

#include "k4/canon.hpp"
#include "k4/history.hpp"
#include "k4/patterns.hpp"
#include "k4/replay.hpp"
#include "k4/strategy.hpp"
#include "k4/verifier.hpp"
#include "optimal_policy.hpp"
#include "oracles.hpp"

using namespace k4;

namespace {

constexpr Player FP = Player::First;
constexpr Player SP = Player::Second;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int hardware_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

// ---- K3 lemma ----------------------------------------------------------------

Verdict k3_lemma() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (int n : {5, 6}) {
    const auto r = verify_k3(n);
    ok = ok && r.outcome == Outcome::Verified && r.max_fp_moves == 4;
    detail += fmt("K%d %s max_fp_moves=%d nodes=%llu; ", n, to_string(r.outcome), r.max_fp_moves,
                  static_cast<unsigned long long>(r.nodes_expanded));
  }
  const double s = since(t0);
  ok = ok && s < 5.0;
  return {ok, detail + fmt("%.2fs (limit 5s)", s)};
}

// ---- promising-graph lemma ---------------------------------------------------

struct PromisingStats {
  std::uint64_t leaves = 0;
  std::string failure;
};

/// All second-player replies from an FP-to-move node in the forced plan.
void walk_plan(const ColoredBoard& board, const StrategyState& state, int plan_len,
               PromisingStats& st, int depth) {
  if (!st.failure.empty()) return;
  if (depth > 2 * plan_len + 2) {
    st.failure = "line longer than the plan";
    return;
  }
  StrategyDecision d;
  try {
    d = fp_move(board, state);
  } catch (const StrategyViolation& e) {
    st.failure = std::string("violation: ") + e.what();
    return;
  }
  if (!board.is_unclaimed(d.edge)) {
    st.failure = "claimed edge " + to_string(d.edge);
    return;
  }
  if (d.reason == DecisionReason::CompleteK4) {
    ++st.leaves;
    return;
  }
  if (d.reason != DecisionReason::ForcedPlanStep) {
    st.failure = std::string("left the plan with ") + to_string(d.reason) + " at " +
                 to_string(d.edge);
    return;
  }
  const ColoredBoard after = board.claimed({FP, d.edge});
  const int need = d.next_state.plan_step == plan_len ? 2 : 1;
  if (completion_count(after, FP, 2) < need) {
    st.failure = fmt("plan step %d leaves fewer than %d completions", int(d.next_state.plan_step),
                     need);
    return;
  }
  for (Edge e : after.unclaimed_edges()) {
    const ColoredBoard next = after.claimed({SP, e});
    if (has_k4(next, SP)) {
      st.failure = "second player completes a K4";
      return;
    }
    walk_plan(next, d.next_state, plan_len, st, depth + 2);
  }
}

/// Type-t fixture on K10 at vertices 0.., padded with a triangle-free SP
/// cycle or path on the spare vertices so the first player is to move.
ColoredBoard promising_board(int type, bool claim_optional) {
  const auto& f = builtin_fixture("promising-" + std::to_string(type));
  ColoredBoard b = embed_fixture(f, 10, {}, claim_optional);
  const int k = static_cast<int>(f.vertices.size());
  std::vector<Vertex> spare;
  for (Vertex v = k; v < 10; ++v) spare.push_back(v);
  std::size_t i = 0;
  while (b.claimed_by(SP) < b.claimed_by(FP)) {
    const Vertex u = spare[i % spare.size()], v = spare[(i + 1) % spare.size()];
    b.claim({SP, Edge(u, v)});
    ++i;
  }
  return b;
}

Verdict promising_lemma() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  auto run = [&](int type, bool claim_optional, const char* tag) {
    const auto& f = builtin_fixture("promising-" + std::to_string(type));
    const ColoredBoard b = promising_board(type, claim_optional);
    Embedding id(f.vertices.size());
    std::iota(id.begin(), id.end(), 0);
    if (!lemma_precondition(b, f, id)) {
      ok = false;
      detail += fmt("T%d%s precondition fails; ", type, tag);
      return;
    }
    StrategyState s;
    s.stage = Stage::ForcedPlan;
    s.plan_type = static_cast<std::uint8_t>(type);
    for (std::size_t i = 0; i < id.size(); ++i) {
      s.set(static_cast<Label>(static_cast<int>(Label::Q0) + static_cast<int>(i)), id[i]);
    }
    PromisingStats st;
    walk_plan(b, s, static_cast<int>(promising_plan(id, type).size()), st, 0);
    if (!st.failure.empty()) {
      ok = false;
      detail += fmt("T%d%s FAIL %s; ", type, tag, st.failure.c_str());
    } else {
      detail += fmt("T%d%s %llu lines; ", type, tag, static_cast<unsigned long long>(st.leaves));
    }
  };
  for (int t = 1; t <= 6; ++t) run(t, true, "");
  run(6, false, " (bd unclaimed)");
  const double s = since(t0);
  ok = ok && s < 60.0;
  return {ok, detail + fmt("%.2fs (limit 60s)", s)};
}

// ---- figure regressions --------------------------------------------------------

Verdict regressions() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir = K4_FIXTURE_DIR;
  bool ok = true;
  std::string detail;
  for (auto [name, after, pairs] :
       {std::tuple<const char*, std::size_t, std::vector<std::pair<const char*, const char*>>>{
            "fig1", 28, {{"P2", "P3"}, {"K", "P2"}}},
        {"fig2", 24, {{"P1", "P2"}, {"M", "P2"}}}}) {
    const auto f = load_fixture(dir / (std::string(name) + ".game"));
    std::map<std::string, Vertex> names(f.names.begin(), f.names.end());
    std::set<std::pair<int, int>> want;
    for (auto [x, y] : pairs) want.insert(std::minmax(names.at(x), names.at(y)));
    const auto got = oracle::completions(oracle::from_board(replay(f.history, after)), 2);
    int forced = 0, forced_ok = 0;
    for (const auto& a : f.assertions) {
      if (a.kind != PredicateKind::ForcedBlock) continue;
      ++forced;
      const oracle::Matrix m = oracle::from_board(replay(f.history, static_cast<std::size_t>(a.after)));
      const auto sp = oracle::completions(m, 2);
      const Edge e = f.history.moves[static_cast<std::size_t>(a.after)].edge;
      if (sp.size() == 1 && *sp.begin() == std::pair<int, int>(e.u, e.v) &&
          oracle::completions(m, 1).empty()) {
        ++forced_ok;
      }
    }
    const bool run_ok = run_fixture(f).passed;
    const bool this_ok = got == want && forced == forced_ok && forced > 0 && run_ok;
    ok = ok && this_ok;
    detail += fmt("%s completions %s, forced blocks %d/%d, sidecar %s; ", name,
                  got == want ? "match" : "DIFFER", forced_ok, forced, run_ok ? "pass" : "FAIL");
  }
  const double s = since(t0);
  ok = ok && s < 1.0;
  return {ok, detail + fmt("%.2fs (limit 1s)", s)};
}

// ---- theorem -----------------------------------------------------------------

VerificationReport theorem_run(VerifyMode mode, const DecisionObserver& observer = {}) {
  VerifyOptions o;
  o.mode = mode;
  o.fp_move_bound = 21;
  o.workers = hardware_workers();
  o.observer = observer;
  return verify(17, o);
}

std::string describe(const VerificationReport& r) {
  std::string s = fmt("%s nodes=%llu %.1fs", to_string(r.outcome),
                      static_cast<unsigned long long>(r.nodes_expanded), r.wall_time_seconds);
  if (r.outcome == Outcome::Verified) s += fmt(" max_fp_moves=%d", r.max_fp_moves);
  if (!r.failure.empty()) s += " (" + r.failure + ")";
  if (r.counterexample) {
    std::string line;
    for (const Move& m : r.counterexample->moves) {
      line += (m.player == FP ? " F" : " S") + to_string(m.edge);
    }
    s += " line:" + line;
  }
  return s;
}

Verdict theorem() {
  const auto paper = theorem_run(VerifyMode::PaperRestricted);
  const auto full = theorem_run(VerifyMode::Full);
  const bool ok = paper.outcome == Outcome::Verified && full.outcome == Outcome::Verified &&
                  paper.max_fp_moves <= 21 && full.max_fp_moves <= 21;
  return {ok, "paper: " + describe(paper) + "; full: " + describe(full)};
}

// ---- strategy invariants -----------------------------------------------------

Verdict invariants() {
  std::atomic<std::uint64_t> seen{0}, claimed{0}, missed_win{0}, missed_block{0};
  DecisionObserver obs = [&](const ColoredBoard& b, const StrategyState&, const StrategyDecision& d) {
    ++seen;
    if (!b.is_unclaimed(d.edge)) ++claimed;
    const auto wins = winning_completions(b, FP);
    if (!wins.empty()) {
      if (!completes_k4(b, FP, d.edge)) ++missed_win;
      return;
    }
    const auto blocks = winning_completions(b, SP);
    if (blocks.size() == 1 && d.edge != blocks[0]) ++missed_block;
  };
  const auto r = theorem_run(VerifyMode::PaperRestricted, obs);
  const std::uint64_t bad = claimed + missed_win + missed_block;
  const bool complete = r.outcome == Outcome::Verified;
  std::string detail = fmt("%llu decisions observed, %llu claimed, %llu missed wins, %llu missed blocks",
                           static_cast<unsigned long long>(seen.load()),
                           static_cast<unsigned long long>(claimed.load()),
                           static_cast<unsigned long long>(missed_win.load()),
                           static_cast<unsigned long long>(missed_block.load()));
  if (!complete) {
    detail += "; coverage incomplete: the theorem run ended " + std::string(to_string(r.outcome)) +
              " before visiting every node";
  }
  return {bad == 0 && complete, detail};
}

// ---- oracle equivalence -------------------------------------------------------

VerifyOptions small_options(int bound) {
  VerifyOptions o;
  o.mode = VerifyMode::Full;
  o.fp_move_bound = bound;
  o.cache_entries = std::size_t{1} << 12;
  return o;
}

/// Verifier with the optimal policy against minimax: same verdict, same length.
bool optimal_agrees(const ColoredBoard& b, Target t, int bound, int& fastest) {
  const auto r = verify_from(b, StrategyState{}, small_options(bound), t,
                             testing_support::optimal_policy(t, bound));
  fastest = testing_support::fastest_win(b, t, bound);
  if ((r.outcome == Outcome::Verified) != (fastest > 0)) return false;
  return fastest == 0 || r.max_fp_moves == fastest;
}

struct OracleTally {
  std::uint64_t positions = 0, mismatches = 0, fp_wins = 0;
};

void walk_k3(const ColoredBoard& board, const StrategyState& state, int made, OracleTally& t) {
  const int left = 4 - made;
  ++t.positions;
  // Sub-verdict of the script itself.
  const auto r = verify_from(board, state, small_options(left), Target::K3, FpOracle(k3_move));
  const bool mm = minimax_oracle(board, FP, Target::K3, 2 * left - 1) == GameValue::FPWin;
  if ((r.outcome == Outcome::Verified) != mm) ++t.mismatches;
  int fastest = 0;
  if (!optimal_agrees(board, Target::K3, left, fastest)) ++t.mismatches;
  if (mm) ++t.fp_wins;

  const StrategyDecision d = k3_move(board, state);
  if (testing_support::closes(board, d.edge, Target::K3)) return;
  const ColoredBoard after = board.claimed({FP, d.edge});
  for (Edge e : after.unclaimed_edges()) {
    const ColoredBoard next = after.claimed({SP, e});
    if ((next.neighbours(SP, e.u) & next.neighbours(SP, e.v)) != 0) continue;
    walk_k3(next, d.next_state, made + 1, t);
  }
}

/// FP-to-move positions with at most seven touched vertices, moved onto K7.
std::vector<ColoredBoard> sample_positions(std::size_t count, std::mt19937_64& rng) {
  std::vector<ColoredBoard> out;
  auto compress = [](const ColoredBoard& b) {
    std::vector<Vertex> perm(static_cast<std::size_t>(b.size()), -1);
    int next = 0;
    for_each_bit(b.touched(), [&](Vertex v) { perm[static_cast<std::size_t>(v)] = next++; });
    ColoredBoard c(7);
    for (Player p : {FP, SP}) {
      for (Edge e : b.edges_of(p)) c.claim({p, Edge(perm[e.u], perm[e.v])});
    }
    return c;
  };
  auto usable = [](const ColoredBoard& b) {
    return popcount(b.touched()) <= 7 && !has_k4(b, FP) && !has_k4(b, SP) && b.to_move() == FP;
  };
  while (out.size() < count) {
    // Alternate strategy-driven and random first players on K17.
    const bool strategy = out.size() % 2 == 0;
    ColoredBoard b(17);
    StrategyState s;
    for (int ply = 0; ply < 40; ++ply) {
      if (has_k4(b, FP) || has_k4(b, SP) || popcount(b.touched()) > 7) break;
      if (b.to_move() == FP) {
        if (usable(b) && b.ply() > 0 && rng() % 3 == 0) out.push_back(compress(b));
        Edge e;
        if (strategy) {
          try {
            const auto d = fp_move(b, s);
            e = d.edge;
            s = d.next_state;
          } catch (const StrategyViolation&) {
            break;
          }
        } else {
          // Random edge among touched vertices plus one fresh vertex.
          const auto moves = sp_candidate_moves(b, StrategyState{}, VerifyMode::Full);
          e = moves[rng() % moves.size()];
        }
        b.claim({FP, e});
      } else {
        const auto moves = sp_candidate_moves(b, StrategyState{}, VerifyMode::Full);
        b.claim({SP, moves[rng() % moves.size()]});
      }
    }
  }
  out.resize(count);
  return out;
}

Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  OracleTally k3;
  walk_k3(ColoredBoard(5), StrategyState{}, 0, k3);

  std::mt19937_64 rng(2024);
  const auto samples = sample_positions(10'000, rng);
  OracleTally k4t;
  for (const auto& b : samples) {
    ++k4t.positions;
    int fastest = 0;
    if (!optimal_agrees(b, Target::K4, 2, fastest)) ++k4t.mismatches;
    if (fastest > 0) ++k4t.fp_wins;
  }
  const double s = since(t0);
  const bool ok = k3.mismatches == 0 && k4t.mismatches == 0 && k4t.positions >= 10'000 && s < 600;
  return {ok, fmt("K3 tree on K5: %llu positions, %llu mismatches; K4 samples: %llu positions "
                  "(%llu first-player wins), %llu mismatches; %.1fs (limit 600s)",
                  static_cast<unsigned long long>(k3.positions),
                  static_cast<unsigned long long>(k3.mismatches),
                  static_cast<unsigned long long>(k4t.positions),
                  static_cast<unsigned long long>(k4t.fp_wins),
                  static_cast<unsigned long long>(k4t.mismatches), s)};
}

// ---- canonicalization ------------------------------------------------------------

ColoredGraph to_colored(const oracle::Graph& g) {
  ColoredGraph c;
  c.k = g.k;
  c.vertex_color = g.vcol;
  c.first.assign(static_cast<std::size_t>(g.k), 0);
  c.second.assign(static_cast<std::size_t>(g.k), 0);
  for (int u = 0; u < g.k; ++u) {
    for (int v = 0; v < g.k; ++v) {
      if (g.at(u, v) == 1) c.first[u] |= bit(v);
      if (g.at(u, v) == 2) c.second[u] |= bit(v);
    }
  }
  return c;
}

/// Isomorphism-invariant fingerprint used only to bucket oracle comparisons.
std::string invariant(const oracle::Graph& g) {
  std::vector<std::array<int, 4>> sig;
  for (int v = 0; v < g.k; ++v) {
    int t1 = 0, t2 = 0;
    for (int a = 0; a < g.k; ++a) {
      for (int b = a + 1; b < g.k; ++b) {
        if (a == v || b == v || g.at(a, b) == 0) continue;
        if (g.at(v, a) != 0 && g.at(v, b) != 0) (g.at(a, b) == 1 ? t1 : t2)++;
      }
    }
    sig.push_back({g.degree(v, 1), g.degree(v, 2), t1, t2});
  }
  std::sort(sig.begin(), sig.end());
  std::string s;
  for (const auto& a : sig) {
    for (int x : a) s += std::to_string(x) + ',';
    s += ';';
  }
  return s;
}

Verdict canonicalization() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::uint64_t perm_failures = 0;
  for (int round = 0; round < 100'000; ++round) {
    const int k = 1 + static_cast<int>(rng() % 8);
    oracle::Graph g(k);
    const int colours = 1 + static_cast<int>(rng() % 3);
    for (int u = 0; u < k; ++u) {
      g.vcol[static_cast<std::size_t>(u)] = static_cast<std::uint32_t>(rng() % colours);
      for (int v = u + 1; v < k; ++v) g.set(u, v, static_cast<std::uint8_t>(rng() % 3));
    }
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    if (canonical_form(to_colored(g)).code != canonical_form(to_colored(oracle::permuted(g, perm))).code) {
      ++perm_failures;
    }
  }

  // Every 2-coloured graph with at most seven edges and no isolated vertex,
  // grown one edge at a time; classes are kept by the oracle.
  struct Rep {
    oracle::Graph g;
    CanonicalCode code;
  };
  std::vector<std::vector<Rep>> layers(8);
  layers[0].push_back({oracle::Graph(0), canonical_form(to_colored(oracle::Graph(0))).code});
  std::uint64_t generated = 0, equality_failures = 0;
  for (int e = 0; e < 7; ++e) {
    std::unordered_map<std::string, std::vector<std::size_t>> buckets;
    auto& next = layers[static_cast<std::size_t>(e + 1)];
    for (const Rep& rep : layers[static_cast<std::size_t>(e)]) {
      const int k = rep.g.k;
      // Endpoints: existing vertices, one new vertex k, or two new k, k+1.
      for (int u = 0; u <= k; ++u) {
        for (int v = u + 1; v <= k + 1; ++v) {
          if (v == k + 1 && u != k) continue;
          if (v < k && rep.g.at(u, v) != 0) continue;
          const int size = std::max(k, v + 1);
          for (std::uint8_t col : {1, 2}) {
            oracle::Graph h(size);
            for (int a = 0; a < k; ++a) {
              for (int b = a + 1; b < k; ++b) h.set(a, b, rep.g.at(a, b));
            }
            h.set(u, v, col);
            ++generated;
            const CanonicalCode code = canonical_form(to_colored(h)).code;
            auto& bucket = buckets[invariant(h)];
            bool found = false;
            for (std::size_t idx : bucket) {
              if (oracle::isomorphic(next[idx].g, h)) {
                found = true;
                if (next[idx].code != code) ++equality_failures;
                break;
              }
            }
            if (!found) {
              bucket.push_back(next.size());
              next.push_back({h, code});
            }
          }
        }
      }
    }
  }
  std::uint64_t classes = 0, collisions = 0;
  for (const auto& layer : layers) {
    std::set<CanonicalCode> codes;
    for (const Rep& r : layer) codes.insert(r.code);
    classes += layer.size();
    collisions += layer.size() - codes.size();
  }
  const double s = since(t0);
  const bool ok = perm_failures == 0 && equality_failures == 0 && collisions == 0 && s < 300;
  return {ok, fmt("10^5 permuted graphs: %llu mismatches; <=7 edges: %llu classes from %llu "
                  "graphs, %llu iso pairs with different codes, %llu non-iso pairs sharing a "
                  "code; %.1fs (limit 300s)",
                  static_cast<unsigned long long>(perm_failures),
                  static_cast<unsigned long long>(classes),
                  static_cast<unsigned long long>(generated),
                  static_cast<unsigned long long>(equality_failures),
                  static_cast<unsigned long long>(collisions), s)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"k3", k3_lemma},          {"promising", promising_lemma}, {"regressions", regressions},
      {"theorem", theorem},      {"oracle", oracle_equivalence}, {"canon", canonicalization},
      {"invariants", invariants},
  };
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == w; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
      return 2;
    }
  }
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!wanted.empty() && !wanted.count(name)) continue;
    const Verdict v = run();
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

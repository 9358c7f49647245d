#include "k4/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "k4/patterns.hpp"

namespace k4 {

namespace {

constexpr Player FP = Player::First;
constexpr Player SP = Player::Second;
constexpr int kInf = 1000;

using Clock = std::chrono::steady_clock;

// ---- target predicates -----------------------------------------------------

bool closes_triangle(const ColoredBoard& b, Player p, Edge e) {
  return (b.neighbours(p, e.u) & b.neighbours(p, e.v)) != 0;
}

bool completes(const ColoredBoard& b, Player p, Edge e, Target t) {
  return t == Target::K3 ? closes_triangle(b, p, e) : completes_k4(b, p, e);
}

int completions(const ColoredBoard& b, Player p, Target t, int limit) {
  if (t == Target::K4) return completion_count(b, p, limit);
  int count = 0;
  for (Vertex u = 0; u < b.size() && count < limit; ++u) {
    const VertexMask open = b.all_vertices() & ~b.claimed_neighbours(u) & ~((bit(u) << 1) - 1);
    for_each_bit(open, [&](Vertex v) {
      if (count < limit && closes_triangle(b, p, Edge(u, v))) ++count;
    });
  }
  return count;
}

std::optional<Edge> first_completing(const ColoredBoard& b, Player p, Target t) {
  if (t == Target::K4) return first_completion(b, p);
  for (Edge e : b.unclaimed_edges()) {
    if (closes_triangle(b, p, e)) return e;
  }
  return std::nullopt;
}

// ---- transposition table ---------------------------------------------------

struct Value {
  int v = 0;
  bool exact = true;  // otherwise v is a lower bound
};

/// Fixed-size, 4-way bucketed table with full keys. Entries can be evicted,
/// which only costs recomputation.
class TranspositionTable {
 public:
  explicit TranspositionTable(std::size_t capacity)
      : buckets_(std::max<std::size_t>(capacity / kWays, 1)), locks_(kStripes) {}

  std::optional<Value> find(const std::string& key, std::size_t h) {
    Bucket& b = buckets_[h % buckets_.size()];
    std::lock_guard lock(locks_[h % kStripes]);
    for (Slot& s : b.slots) {
      if (s.used && s.hash == h && s.key == key) return s.value;
    }
    return std::nullopt;
  }

  /// Returns true if the key was not present before.
  bool store(const std::string& key, std::size_t h, Value v) {
    Bucket& b = buckets_[h % buckets_.size()];
    std::lock_guard lock(locks_[h % kStripes]);
    for (Slot& s : b.slots) {
      if (s.used && s.hash == h && s.key == key) {
        if (v.exact || (!s.value.exact && v.v > s.value.v)) s.value = v;
        return false;
      }
    }
    Slot* victim = nullptr;
    for (Slot& s : b.slots) {
      if (!s.used) {
        victim = &s;
        break;
      }
    }
    if (victim == nullptr) {
      for (Slot& s : b.slots) {
        if (!s.value.exact) {
          victim = &s;
          break;
        }
      }
    }
    if (victim == nullptr) {
      victim = &b.slots[b.next_victim];
      b.next_victim = static_cast<std::uint8_t>((b.next_victim + 1) % kWays);
    }
    victim->used = true;
    victim->hash = h;
    victim->key = key;
    victim->value = v;
    return true;
  }

 private:
  static constexpr int kWays = 4;
  static constexpr std::size_t kStripes = 4096;
  struct Slot {
    std::string key;
    std::size_t hash = 0;
    Value value;
    bool used = false;
  };
  struct Bucket {
    std::array<Slot, kWays> slots;
    std::uint8_t next_victim = 0;
  };
  std::vector<Bucket> buckets_;
  std::vector<std::mutex> locks_;
};

// ---- search ----------------------------------------------------------------

struct Cancelled {};

class Search {
 public:
  Search(const VerifyOptions& opts, Target target, FpOracle oracle)
      : opts_(opts),
        target_(target),
        oracle_(std::move(oracle)),
        table_(opts.use_cache ? opts.cache_entries : 1),
        start_(Clock::now()),
        ply_bound_(opts.ply_bound.value_or(2 * opts.fp_move_bound + 2)) {}

  /// First player to move with `b` moves left.
  Value solve_fp(const ColoredBoard& board, const StrategyState& state, int b, int ply) {
    tick();
    if (b <= 0 || ply > ply_bound_) return {std::max(b, 0) + 1, false};
    stage_nodes_[static_cast<int>(state.stage)].fetch_add(1, std::memory_order_relaxed);
    StrategyDecision d;
    try {
      d = oracle_(board, state);
    } catch (const StrategyViolation&) {
      return {kInf, true};
    } catch (const BoardError&) {
      return {kInf, true};
    }
    if (opts_.observer) opts_.observer(board, state, d);
    if (!board.is_unclaimed(d.edge)) return {kInf, true};
    if (completes(board, FP, d.edge, target_)) return {1, true};
    const ColoredBoard next = board.claimed({FP, d.edge});
    const Value r = solve_sp(next, d.next_state, b - 1, ply + 1);
    if (r.v >= kInf) return r;
    return {r.v + 1, r.exact};
  }

  /// Second player to move; the first player may still make `b` moves.
  Value solve_sp(const ColoredBoard& board, const StrategyState& state, int b, int ply) {
    tick();
    if (completions(board, SP, target_, 1) > 0) return {kInf, true};
    if (board.unclaimed_count() == 0) return {kInf, true};
    if (b <= 0 || ply > ply_bound_) return {std::max(b, 0) + 1, false};

    std::string key;
    std::size_t h = 0;
    if (opts_.use_cache) {
      key = position_key(board, state);
      h = std::hash<std::string>{}(key);
      if (auto hit = table_.find(key, h)) {
        if (hit->exact || hit->v > b) {
          hits_.fetch_add(1, std::memory_order_relaxed);
          return *hit;
        }
      }
    }

    const Value v = expand_sp(board, state, b, ply);
    if (opts_.use_cache && table_.store(key, h, v)) {
      stored_.fetch_add(1, std::memory_order_relaxed);
    }
    return v;
  }

  /// Children that must be searched at an SP node, with the value already
  /// guaranteed by the skipped ones.
  std::vector<Edge> sp_children(const ColoredBoard& board, const StrategyState& state,
                                int& floor) const {
    floor = 0;
    if (target_ == Target::K4) {
      const int fc = completions(board, FP, target_, 2);
      if (fc >= 2) {
        floor = 1;
        return {};
      }
      if (fc == 1) {
        // Anything but the block loses to the completion next move.
        floor = 1;
        return {*first_completing(board, FP, target_)};
      }
    }
    return sp_candidate_moves(board, state, opts_.mode);
  }

  Value expand_sp(const ColoredBoard& board, const StrategyState& state, int b, int ply) {
    int floor = 0;
    const std::vector<Edge> moves = sp_children(board, state, floor);
    Value best{floor, true};
    for (Edge e : moves) {
      const Value c = solve_fp(board.claimed({SP, e}), state, b, ply + 1);
      if (c.v >= kInf) return c;
      if (!c.exact) return c;
      best.v = std::max(best.v, c.v);
    }
    return best;
  }

  void tick() {
    const std::uint64_t n = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
    if (cancel_.load(std::memory_order_relaxed)) throw Cancelled{};
    if (opts_.budget_nodes != 0 && n > opts_.budget_nodes) {
      throw ResourceLimitError("node budget of " + std::to_string(opts_.budget_nodes) +
                               " exhausted");
    }
    if ((n & 0xFFF) == 0 && opts_.budget_seconds > 0 && seconds() > opts_.budget_seconds) {
      throw ResourceLimitError("time budget exhausted");
    }
    if (n % 1'000'000 == 0 && opts_.progress) opts_.progress(progress());
  }

  ProgressInfo progress() const {
    return {nodes_.load(), hits_.load(), stored_.load(), seconds()};
  }

  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  void cancel() { cancel_.store(true); }
  void resume() { cancel_.store(false); }

  const VerifyOptions& opts() const { return opts_; }
  Target target() const { return target_; }
  const FpOracle& oracle() const { return oracle_; }
  int ply_bound() const { return ply_bound_; }

  void fill(VerificationReport& r) const {
    r.nodes_expanded = nodes_.load();
    r.cache_hits = hits_.load();
    r.distinct_canonical_states = stored_.load();
    for (int i = 0; i < 8; ++i) r.stage_nodes[i] = stage_nodes_[i].load();
    r.wall_time_seconds = seconds();
  }

 private:
  const VerifyOptions& opts_;
  Target target_;
  FpOracle oracle_;
  TranspositionTable table_;
  Clock::time_point start_;
  int ply_bound_;
  std::atomic<std::uint64_t> nodes_{0}, hits_{0}, stored_{0};
  std::array<std::atomic<std::uint64_t>, 8> stage_nodes_{};
  std::atomic<bool> cancel_{false};
};

struct Frontier {
  ColoredBoard board;
  StrategyState state;
  int b;
  int ply;
};

/// SP nodes `depth` SP-plies below the root, deduplicated by key.
void collect_frontier(Search& s, const ColoredBoard& board, const StrategyState& state, int b,
                      int ply, int depth, std::vector<Frontier>& out,
                      std::unordered_set<std::string>& seen) {
  // First-player node.
  if (b <= 0) return;
  StrategyDecision d;
  try {
    d = s.oracle()(board, state);
  } catch (const std::exception&) {
    return;
  }
  if (!board.is_unclaimed(d.edge) || completes(board, FP, d.edge, s.target())) return;
  const ColoredBoard next = board.claimed({FP, d.edge});
  if (completions(next, SP, s.target(), 1) > 0 || next.unclaimed_count() == 0) return;
  if (!seen.insert(position_key(next, d.next_state)).second) return;
  if (depth == 0) {
    out.push_back({next, d.next_state, b - 1, ply + 1});
    return;
  }
  int floor = 0;
  for (Edge e : s.sp_children(next, d.next_state, floor)) {
    collect_frontier(s, next.claimed({SP, e}), d.next_state, b - 1, ply + 2, depth - 1, out, seen);
  }
}

void solve_parallel(Search& s, const ColoredBoard& board, const StrategyState& state, int b) {
  const int workers = s.opts().workers;
  std::vector<Frontier> frontier;
  for (int depth = 1; depth <= 4; ++depth) {
    frontier.clear();
    std::unordered_set<std::string> seen;
    collect_frontier(s, board, state, b, 0, depth, frontier, seen);
    if (frontier.size() >= static_cast<std::size_t>(32 * workers)) break;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto work = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < frontier.size(); i = next.fetch_add(1)) {
        const Frontier& f = frontier[i];
        const Value v = s.solve_sp(f.board, f.state, f.b, f.ply);
        if (!v.exact || v.v >= kInf) s.cancel();  // a failure is already certain
      }
    } catch (const Cancelled&) {
    } catch (...) {
      std::lock_guard lock(err_mu);
      if (!err) err = std::current_exception();
      s.cancel();
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  s.resume();
  if (err) std::rethrow_exception(err);
}

/// Follows a failing line from an FP node and returns its moves.
std::string extract_counterexample(Search& s, ColoredBoard board, StrategyState state, int b,
                                   std::vector<Move>& moves) {
  for (int ply = 0;; ply += 2) {
    if (b <= 0) return "first player exceeded the move bound";
    if (ply > s.ply_bound()) return "ply bound reached";
    StrategyDecision d;
    try {
      d = s.oracle()(board, state);
    } catch (const std::exception& ex) {
      return std::string("strategy violation: ") + ex.what();
    }
    if (!board.is_unclaimed(d.edge)) return "strategy chose claimed edge " + to_string(d.edge);
    moves.push_back({FP, d.edge});
    if (completes(board, FP, d.edge, s.target())) return "no failure (first player won)";
    board.claim({FP, d.edge});
    state = d.next_state;
    --b;
    if (auto w = first_completing(board, SP, s.target())) {
      moves.push_back({SP, *w});
      return "second player completes the target";
    }
    if (board.unclaimed_count() == 0) return "board exhausted without a winner";
    if (b <= 0) return "first player exceeded the move bound";
    int floor = 0;
    std::optional<Edge> bad;
    for (Edge e : s.sp_children(board, state, floor)) {
      const Value v = s.solve_fp(board.claimed({SP, e}), state, b, ply + 2);
      if (!v.exact || v.v > b) {
        bad = e;
        break;
      }
    }
    if (!bad) return "no failing reply found";
    moves.push_back({SP, *bad});
    board.claim({SP, *bad});
  }
}

GameHistory prefix_history(const ColoredBoard& board) {
  GameHistory h;
  h.board_size = board.size();
  const auto fp = board.edges_of(FP), sp = board.edges_of(SP);
  for (std::size_t i = 0; i < std::max(fp.size(), sp.size()); ++i) {
    if (i < fp.size()) h.moves.push_back({FP, fp[i]});
    if (i < sp.size()) h.moves.push_back({SP, sp[i]});
  }
  return h;
}

}  // namespace

const char* to_string(VerifyMode m) { return m == VerifyMode::Full ? "full" : "paper"; }

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Verified: return "Verified";
    case Outcome::CounterexampleFound: return "CounterexampleFound";
    case Outcome::ResourceLimit: return "ResourceLimit";
  }
  return "?";
}

const char* to_string(GameValue v) {
  switch (v) {
    case GameValue::FPWin: return "FPWin";
    case GameValue::SPWin: return "SPWin";
    case GameValue::SPSurvives: return "SPSurvives";
  }
  return "?";
}

std::string position_key(const ColoredBoard& board, const StrategyState& state) {
  std::vector<std::uint32_t> colors(static_cast<std::size_t>(board.size()), 0);
  VertexMask keep = 0;
  for (int l = 0; l < kLabelCount; ++l) {
    const int v = state.labels[l];
    if (v >= 0) {
      colors[v] |= std::uint32_t{1} << l;
      keep |= bit(v);
    }
  }
  std::vector<Vertex> local_to_board;
  ColoredGraph g = claimed_subgraph(board, keep, &colors, &local_to_board);
  const CanonicalForm form = canonical_form(g);
  std::string key(form.code.bytes.begin(), form.code.bytes.end());
  key.push_back(static_cast<char>(state.stage));
  key.push_back(static_cast<char>(state.step));
  key.push_back(static_cast<char>(state.p_count));
  key.push_back(static_cast<char>(state.mk3_step));
  key.push_back(static_cast<char>(state.plan_type));
  key.push_back(static_cast<char>(state.plan_step));
  return key;
}

std::vector<Edge> sp_candidate_moves(const ColoredBoard& board, const StrategyState& state,
                                     VerifyMode mode) {
  const VertexMask touched = board.touched();
  const VertexMask fresh = board.all_vertices() & ~touched;
  std::vector<Edge> out;
  const Vertex f1 = fresh != 0 ? lowest(fresh) : -1;
  const VertexMask rest = fresh & (fresh - 1);
  const Vertex f2 = rest != 0 ? lowest(rest) : -1;
  for_each_bit(touched, [&](Vertex u) {
    const VertexMask later = touched & ~((bit(u) << 1) - 1) & ~board.claimed_neighbours(u);
    for_each_bit(later, [&](Vertex v) { out.emplace_back(u, v); });
    if (f1 >= 0) out.emplace_back(u, f1);
  });
  if (f2 >= 0) out.emplace_back(f1, f2);
  std::sort(out.begin(), out.end());

  if (mode == VerifyMode::PaperRestricted && state.stage == Stage::S3 && state.step >= 1 &&
      state.p_count >= 1) {
    const int i = state.p_count - 1;
    const Vertex p = state.p(i);
    const Vertex m = state.get(Label::M);
    // Restrict only directly after m p_i, i.e. p_i's one claimed edge is m p_i.
    if (i <= 3 && board.claimed_neighbours(p) == bit(m) && board.owns(FP, p, m)) {
      std::vector<Edge> allowed{Edge(p, state.get(Label::N))};
      if (i == 3) {
        allowed.emplace_back(p, state.get(Label::L));
        allowed.emplace_back(p, state.get(Label::R));
      }
      std::vector<Edge> kept;
      for (Edge e : out) {
        const bool listed = std::find(allowed.begin(), allowed.end(), e) != allowed.end();
        if (listed || completion_count(board.claimed({SP, e}), SP, 1) > 0) kept.push_back(e);
      }
      out = std::move(kept);
    }
  }
  return out;
}

VerificationReport verify_from(const ColoredBoard& board, const StrategyState& state,
                               const VerifyOptions& opts, Target target,
                               const FpOracle& oracle) {
  FpOracle fp = oracle ? oracle : FpOracle(fp_move);
  Search s(opts, target, fp);
  VerificationReport r;
  r.board_size = board.size();
  r.target = target;
  r.mode = opts.mode;
  r.fp_move_bound = opts.fp_move_bound;
  r.workers = std::max(opts.workers, 1);
  try {
    if (opts.workers > 1) solve_parallel(s, board, state, opts.fp_move_bound);
    const Value v = s.solve_fp(board, state, opts.fp_move_bound, 0);
    if (v.exact && v.v <= opts.fp_move_bound) {
      r.outcome = Outcome::Verified;
      r.max_fp_moves = v.v;
    } else {
      r.outcome = Outcome::CounterexampleFound;
      GameHistory h = prefix_history(board);
      std::vector<Move> line;
      r.failure = extract_counterexample(s, board, state, opts.fp_move_bound, line);
      r.max_fp_moves = static_cast<int>(std::count_if(
          line.begin(), line.end(), [](const Move& m) { return m.player == FP; }));
      h.moves.insert(h.moves.end(), line.begin(), line.end());
      r.counterexample = std::move(h);
    }
  } catch (const ResourceLimitError& ex) {
    r.outcome = Outcome::ResourceLimit;
    r.failure = ex.what();
  }
  s.fill(r);
  return r;
}

VerificationReport verify(int n, const VerifyOptions& opts) {
  return verify_from(ColoredBoard(n), StrategyState{}, opts);
}

VerificationReport verify_k3(int n, const VerifyOptions& opts) {
  if (n < 5) {
    VerificationReport r;
    r.board_size = n;
    r.target = Target::K3;
    r.outcome = Outcome::CounterexampleFound;
    r.failure = "the K3 script needs at least five vertices";
    // Still search, so the report carries a concrete losing line.
    VerifyOptions o = opts;
    o.fp_move_bound = 4;
    VerificationReport searched = verify_from(ColoredBoard(n), StrategyState{}, o, Target::K3,
                                              FpOracle(k3_move));
    if (searched.outcome != Outcome::Verified) {
      searched.failure = r.failure + "; " + searched.failure;
      return searched;
    }
    return r;
  }
  VerifyOptions o = opts;
  o.fp_move_bound = 4;
  return verify_from(ColoredBoard(n), StrategyState{}, o, Target::K3, FpOracle(k3_move));
}

std::set<std::string> enumerate_stage_boundary(int n) {
  std::set<std::string> out;
  std::unordered_set<std::string> seen;
  const VerifyOptions opts;
  std::function<void(const ColoredBoard&, const StrategyState&)> visit =
      [&](const ColoredBoard& board, const StrategyState& state) {
        StrategyDecision d;
        try {
          d = fp_move(board, state);
        } catch (const std::exception&) {
          return;
        }
        if (d.reason == DecisionReason::CompleteK4) return;
        const ColoredBoard next = board.claimed({FP, d.edge});
        const std::string key = position_key(next, d.next_state);
        if (d.next_state.stage != Stage::S1 && d.next_state.stage != Stage::S2) {
          out.insert(key);
          return;
        }
        if (!seen.insert(key).second) return;
        for (Edge e : sp_candidate_moves(next, d.next_state, VerifyMode::Full)) {
          visit(next.claimed({SP, e}), d.next_state);
        }
      };
  visit(ColoredBoard(n), StrategyState{});
  return out;
}

std::string to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["board_size"] = r.board_size;
  j["target"] = r.target == Target::K3 ? "K3" : "K4";
  j["mode"] = to_string(r.mode);
  j["outcome"] = to_string(r.outcome);
  j["fp_move_bound"] = r.fp_move_bound;
  j["workers"] = r.workers;
  j["max_fp_moves"] = r.max_fp_moves;
  if (r.counterexample) {
    j["counterexample"] = serialize(*r.counterexample);
  } else {
    j["counterexample"] = nullptr;
  }
  j["failure"] = r.failure;
  j["nodes_expanded"] = r.nodes_expanded;
  j["cache_hits"] = r.cache_hits;
  j["distinct_canonical_states"] = r.distinct_canonical_states;
  j["wall_time_seconds"] = r.wall_time_seconds;
  nlohmann::ordered_json stages;
  for (int i = 0; i < 8; ++i) stages[to_string(static_cast<Stage>(i))] = r.stage_nodes[i];
  j["stage_nodes"] = stages;
  return j.dump(2);
}

// ---- independent minimax ---------------------------------------------------

namespace {

class Minimax {
 public:
  Minimax(const ColoredBoard& board, Target target, std::uint64_t budget)
      : n_(board.size()), need_(target == Target::K3 ? 3 : 4), budget_(budget) {
    cells_.assign(static_cast<std::size_t>(n_ * n_), 0);
    for (int u = 0; u < n_; ++u) {
      for (int v = 0; v < n_; ++v) {
        if (u == v) continue;
        const EdgeState s = board.at(u, v);
        cells_[u * n_ + v] = s == EdgeState::First ? 1 : (s == EdgeState::Second ? 2 : 0);
      }
    }
  }

  GameValue run(int mover, int plies) {
    std::string key(cells_.begin(), cells_.end());
    key.push_back(static_cast<char>(mover));
    key.push_back(static_cast<char>(plies));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (++nodes_ > budget_) throw ResourceLimitError("minimax budget exhausted");

    const GameValue win = mover == 1 ? GameValue::FPWin : GameValue::SPWin;
    const GameValue loss = mover == 1 ? GameValue::SPWin : GameValue::FPWin;
    GameValue best = loss;
    bool any = false;
    if (plies > 0) {
      for (int u = 0; u < n_ && best != win; ++u) {
        for (int v = u + 1; v < n_ && best != win; ++v) {
          if (cells_[u * n_ + v] != 0) continue;
          any = true;
          set(u, v, mover);
          GameValue r;
          if (wins_with(u, v, mover)) {
            r = win;
          } else {
            r = run(3 - mover, plies - 1);
          }
          set(u, v, 0);
          if (rank(r, mover) > rank(best, mover)) best = r;
        }
      }
    }
    if (!any) best = GameValue::SPSurvives;
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  static int rank(GameValue r, int mover) {
    if (r == GameValue::SPSurvives) return 1;
    const bool good = (r == GameValue::FPWin) == (mover == 1);
    return good ? 2 : 0;
  }

  void set(int u, int v, char c) {
    cells_[u * n_ + v] = c;
    cells_[v * n_ + u] = c;
  }

  bool owned(int u, int v, int p) const { return cells_[u * n_ + v] == p; }

  /// Does the fresh edge uv complete a clique of size need_ for player p?
  bool wins_with(int u, int v, int p) const {
    std::vector<int> common;
    for (int w = 0; w < n_; ++w) {
      if (w != u && w != v && owned(u, w, p) && owned(v, w, p)) common.push_back(w);
    }
    if (need_ == 3) return !common.empty();
    for (std::size_t i = 0; i < common.size(); ++i) {
      for (std::size_t j = i + 1; j < common.size(); ++j) {
        if (owned(common[i], common[j], p)) return true;
      }
    }
    return false;
  }

  int n_;
  int need_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<char> cells_;
  std::unordered_map<std::string, GameValue> memo_;
};

}  // namespace

GameValue minimax_oracle(const ColoredBoard& board, Player to_move, Target target, int max_plies,
                         std::uint64_t budget_nodes) {
  Minimax m(board, target, budget_nodes);
  return m.run(to_move == FP ? 1 : 2, max_plies);
}

}  // namespace k4

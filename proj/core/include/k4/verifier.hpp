#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include "k4/board.hpp"
#include "k4/canon.hpp"
#include "k4/history.hpp"
#include "k4/strategy.hpp"

namespace k4 {

enum class VerifyMode : std::uint8_t { Full, PaperRestricted };
enum class Outcome : std::uint8_t { Verified, CounterexampleFound, ResourceLimit };
enum class Target : std::uint8_t { K3, K4 };

const char* to_string(VerifyMode m);
const char* to_string(Outcome o);

struct ProgressInfo {
  std::uint64_t nodes = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t stored = 0;
  double seconds = 0;
};

/// Seen at every first-player node: board before the move, the decision and
/// the board after it. Called concurrently from workers.
using DecisionObserver =
    std::function<void(const ColoredBoard&, const StrategyState&, const StrategyDecision&)>;

using FpOracle = std::function<StrategyDecision(const ColoredBoard&, const StrategyState&)>;

struct VerifyOptions {
  VerifyMode mode = VerifyMode::Full;
  int fp_move_bound = 21;
  int workers = 1;
  std::uint64_t budget_nodes = 0;  // 0 = unlimited
  double budget_seconds = 0;       // 0 = unlimited
  bool use_cache = true;
  std::size_t cache_entries = std::size_t{1} << 21;
  /// Extra cap on plies from the root; default 2 * bound + 2.
  std::optional<int> ply_bound;
  std::function<void(const ProgressInfo&)> progress;
  DecisionObserver observer;
};

struct VerificationReport {
  int board_size = 0;
  Target target = Target::K4;
  VerifyMode mode = VerifyMode::Full;
  Outcome outcome = Outcome::Verified;
  int fp_move_bound = 0;
  int workers = 1;
  /// Worst-case first-player moves over all branches (Verified only).
  int max_fp_moves = 0;
  std::optional<GameHistory> counterexample;
  std::string failure;  // why the counterexample loses
  std::uint64_t nodes_expanded = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t distinct_canonical_states = 0;
  double wall_time_seconds = 0;
  /// First-player nodes per stage, indexed by Stage.
  std::array<std::uint64_t, 8> stage_nodes{};
};

/// Structured (JSON) form of every report field.
std::string to_json(const VerificationReport& r);

/// Exhaustive check of the K4 strategy from the empty K^n.
VerificationReport verify(int n, const VerifyOptions& opts = {});

/// Same from an arbitrary position with the first player to move.
VerificationReport verify_from(const ColoredBoard& board, const StrategyState& state,
                               const VerifyOptions& opts, Target target = Target::K4,
                               const FpOracle& oracle = {});

/// K3 script against every reply; n >= 5.
VerificationReport verify_k3(int n, const VerifyOptions& opts = {});

/// Transposition key of a position: canonical code of the board with the
/// strategy labels as vertex colours, followed by the scalar state.
std::string position_key(const ColoredBoard& board, const StrategyState& state);

/// Second-player replies considered at a node, after merging replies that
/// differ only in which fresh vertex they use. PaperRestricted additionally
/// applies the p_i restriction of Stage 3.
std::vector<Edge> sp_candidate_moves(const ColoredBoard& board, const StrategyState& state,
                                     VerifyMode mode);

/// Canonical codes of all positions where the strategy leaves Stage 2.
std::set<std::string> enumerate_stage_boundary(int n);

enum class GameValue : std::uint8_t { FPWin, SPWin, SPSurvives };
const char* to_string(GameValue v);

/// Plain minimax on the raw board; shares no code with the strategy,
/// pattern or canonical modules.
GameValue minimax_oracle(const ColoredBoard& board, Player to_move, Target target,
                         int max_plies, std::uint64_t budget_nodes = 50'000'000);

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace k4

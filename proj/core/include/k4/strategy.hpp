#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "k4/board.hpp"
#include "k4/fixtures.hpp"

namespace k4 {

enum class Stage : std::uint8_t { S1, S2, S3, S4, S5, S6, ForcedPlan, Finished };

const char* to_string(Stage s);

/// Named vertices the first player tracks. The first block mirrors the role
/// names of the strategy; the rest is bookkeeping for the sub-strategies.
enum class Label : std::uint8_t {
  A, B, C, G, M, N, L, R, P0, P1, P2, P3, P4,
  K3U,              // third-move vertex of the K3 script
  K3S1, K3S2,       // second player's first edge
  F1, F2,           // first edge of the modified K3 script
  Q0, Q1, Q2, Q3, Q4, Q5, Q6,  // embedding of the promising graph being forced
  Count
};

inline constexpr int kLabelCount = static_cast<int>(Label::Count);
const char* to_string(Label l);

class StrategyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StrategyState {
  Stage stage = Stage::S1;
  /// Stage-internal step counter; suspended while the standing rule blocks.
  std::uint8_t step = 0;
  /// Number of defined p_i (always a prefix P0..).
  std::uint8_t p_count = 0;
  /// Moves already made by the running modified K3 script (0 = idle).
  std::uint8_t mk3_step = 0;
  /// Promising type 1..6 being forced, and how many planned moves were made.
  std::uint8_t plan_type = 0;
  std::uint8_t plan_step = 0;
  std::uint8_t fp_move_count = 0;
  std::array<std::int8_t, kLabelCount> labels;

  StrategyState() { labels.fill(-1); }

  bool has(Label l) const { return labels[static_cast<int>(l)] >= 0; }
  Vertex get(Label l) const;
  void set(Label l, Vertex v) { labels[static_cast<int>(l)] = static_cast<std::int8_t>(v); }
  void clear(Label l) { labels[static_cast<int>(l)] = -1; }
  Vertex p(int i) const { return get(static_cast<Label>(static_cast<int>(Label::P0) + i)); }
  void set_p(int i, Vertex v) { set(static_cast<Label>(static_cast<int>(Label::P0) + i), v); }

  /// One line: stage tag, counters and label bindings.
  std::string to_text() const;
  static StrategyState from_text(std::string_view text);

  friend bool operator==(const StrategyState&, const StrategyState&) = default;
};

enum class DecisionReason : std::uint8_t { CompleteK4, BlockThreat, StagePlay, ForcedPlanStep };

const char* to_string(DecisionReason r);

struct StrategyDecision {
  Edge edge;
  DecisionReason reason = DecisionReason::StagePlay;
  StrategyState next_state;
};

/// Win if possible, else block the least second-player completion.
std::optional<StrategyDecision> standing_assumption(const ColoredBoard& board,
                                                    const StrategyState& state);

/// Four-turn K3 script. Also used on its own by the K3 verifier.
StrategyDecision k3_move(const ColoredBoard& board, const StrategyState& state);

/// Triangle on the five vertices `P`, all joined to `hub` by the first
/// player. Progress lives in state.mk3_step / F1 / F2.
StrategyDecision modified_k3_move(const ColoredBoard& board, const StrategyState& state,
                                  const std::array<Vertex, 5>& P);

/// The first player's move: standing rule, then the current stage.
StrategyDecision fp_move(const ColoredBoard& board, const StrategyState& state);

struct PlannedMove {
  Edge edge;
  /// Block the second player is expected to make; absent after the final
  /// move, which leaves two threats.
  std::optional<Edge> expected_reply;
};

/// Forced line for a realised promising graph of `type` (1..6) under
/// `embedding` (images of a..g).
std::vector<PlannedMove> promising_plan(const Embedding& embedding, int type);

struct PromisingMatch {
  int type = 0;
  Embedding embedding;
};

/// True when no second-player K4 or threat appears even with the
/// vulnerable edges handed to the second player.
bool lemma_precondition(const ColoredBoard& board, const PatternFixture& fixture,
                        const Embedding& embedding);

/// First realised promising graph (type order, then embedding order) that
/// satisfies the precondition.
std::optional<PromisingMatch> find_promising(const ColoredBoard& board);

}  // namespace k4

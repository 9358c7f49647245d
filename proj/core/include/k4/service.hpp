#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "k4/history.hpp"
#include "k4/strategy.hpp"

namespace httplib {
class Server;
}

namespace k4 {

enum class SessionStatus : std::uint8_t { AwaitingHuman, EngineWon, HumanWon, Aborted };
const char* to_string(SessionStatus s);

enum class ServiceErrorCode : std::uint8_t {
  InvalidSize,
  InvalidMove,
  NotYourTurn,
  AlreadyClaimed,
  UnknownSession,
  EngineFault,
  StoreFailure,
};
const char* to_string(ServiceErrorCode c);

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ServiceErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ServiceErrorCode code() const { return code_; }

 private:
  ServiceErrorCode code_;
};

/// Key-value persistence for sessions. Values are opaque text records.
class SessionStore {
 public:
  virtual ~SessionStore() = default;
  virtual std::optional<std::string> get(const std::string& id) = 0;
  virtual void put(const std::string& id, const std::string& record) = 0;
  virtual bool erase(const std::string& id) = 0;
};

/// SQLite-backed store; ":memory:" gives a private in-memory database.
std::unique_ptr<SessionStore> open_sqlite_store(const std::string& path);

struct EngineMove {
  Edge edge;
  DecisionReason reason = DecisionReason::StagePlay;
};

struct Session {
  std::string id;
  GameHistory history;
  ColoredBoard board;
  StrategyState state;
  SessionStatus status = SessionStatus::AwaitingHuman;
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;
  std::optional<EngineMove> last_engine_move;
  int engine_moves = 0;
};

struct MoveResult {
  Session session;
  Edge human_move;
  std::optional<EngineMove> engine_move;
};

/// Human plays the second player; the engine answers with fp_move. The
/// serialized history is the stored source of truth.
class GameService {
 public:
  explicit GameService(std::unique_ptr<SessionStore> store);

  Session create_session(int n);
  MoveResult submit_move(const std::string& id, Edge edge);
  Session get(const std::string& id);
  void remove(const std::string& id);

  /// JSON documents for the HTTP layer and the terminal client.
  static std::string session_json(const Session& s);
  static std::string move_json(const MoveResult& r);
  static std::string analysis_json(const Session& s);
  static std::string error_json(ServiceErrorCode code, const std::string& message);

  /// Most engine moves a game may take before the service flags a fault.
  static constexpr int kEngineMoveCeiling = 21;

 private:
  Session load(const std::string& id);
  void save(const Session& s);
  std::shared_ptr<std::mutex> lock_for(const std::string& id);
  void engine_reply(Session& s);
  std::string new_id();

  std::unique_ptr<SessionStore> store_;
  std::mutex map_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::mutex id_mu_;
  std::uint64_t id_state_[2];
};

/// Registers the REST routes on `server`.
void mount_routes(httplib::Server& server, GameService& service);

}  // namespace k4

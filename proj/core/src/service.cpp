#include "k4/service.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "k4/fixtures.hpp"
#include "k4/patterns.hpp"

namespace k4 {

using json = nlohmann::ordered_json;

const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::AwaitingHuman: return "AwaitingHuman";
    case SessionStatus::EngineWon: return "EngineWon";
    case SessionStatus::HumanWon: return "HumanWon";
    case SessionStatus::Aborted: return "Aborted";
  }
  return "?";
}

const char* to_string(ServiceErrorCode c) {
  switch (c) {
    case ServiceErrorCode::InvalidSize: return "InvalidSize";
    case ServiceErrorCode::InvalidMove: return "InvalidMove";
    case ServiceErrorCode::NotYourTurn: return "NotYourTurn";
    case ServiceErrorCode::AlreadyClaimed: return "AlreadyClaimed";
    case ServiceErrorCode::UnknownSession: return "UnknownSession";
    case ServiceErrorCode::EngineFault: return "EngineFault";
    case ServiceErrorCode::StoreFailure: return "StoreFailure";
  }
  return "?";
}

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

json edge_json(Edge e) { return json::array({e.u, e.v}); }

json edges_json(const std::vector<Edge>& es) {
  json a = json::array();
  for (Edge e : es) a.push_back(edge_json(e));
  return a;
}

json threats_json(const ColoredBoard& b, Player p) {
  json a = json::array();
  for (const auto& t : threats(b, p)) {
    a.push_back({{"quad", t.quad}, {"missing", edge_json(t.missing_edge)}});
  }
  return a;
}

json seeds_json(const ColoredBoard& b, Player p) {
  json a = json::array();
  for (const auto& s : threat_seeds(b, p)) {
    a.push_back({{"quad", s.quad},
                 {"shape", s.shape == SeedShape::C4 ? "C4" : "TrianglePlusEdge"}});
  }
  return a;
}

json labels_json(const StrategyState& st) {
  json o = json::object();
  for (int i = 0; i < kLabelCount; ++i) {
    if (st.labels[i] >= 0) o[to_string(static_cast<Label>(i))] = st.labels[i];
  }
  return o;
}

json engine_move_json(const std::optional<EngineMove>& m) {
  if (!m) return nullptr;
  return {{"u", m->edge.u}, {"v", m->edge.v}, {"reason", to_string(m->reason)}};
}

json session_doc(const Session& s) {
  json moves = json::array();
  for (const Move& m : s.history.moves) {
    moves.push_back({{"player", to_string(m.player)}, {"u", m.edge.u}, {"v", m.edge.v}});
  }
  return {{"id", s.id},
          {"n", s.board.size()},
          {"status", to_string(s.status)},
          {"engine_moves", s.engine_moves},
          {"stage", to_string(s.state.stage)},
          {"fp_edges", edges_json(s.board.edges_of(Player::First))},
          {"sp_edges", edges_json(s.board.edges_of(Player::Second))},
          {"moves", moves},
          {"last_engine_move", engine_move_json(s.last_engine_move)},
          {"threats",
           {{"fp", threats_json(s.board, Player::First)},
            {"sp", threats_json(s.board, Player::Second)}}},
          {"created_ms", s.created_ms},
          {"updated_ms", s.updated_ms}};
}

struct Record {
  GameHistory history;
  bool aborted = false;
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;
};

std::string encode(const Session& s) {
  return json{{"history", serialize(s.history)},
              {"aborted", s.status == SessionStatus::Aborted},
              {"created_ms", s.created_ms},
              {"updated_ms", s.updated_ms}}
      .dump();
}

Record decode(const std::string& text) {
  const json j = json::parse(text);
  return {parse_script(j.at("history").get<std::string>()), j.at("aborted").get<bool>(),
          j.at("created_ms").get<std::int64_t>(), j.at("updated_ms").get<std::int64_t>()};
}

SessionStatus derive_status(const ColoredBoard& b, bool aborted) {
  if (has_k4(b, Player::First)) return SessionStatus::EngineWon;
  if (has_k4(b, Player::Second)) return SessionStatus::HumanWon;
  if (aborted || b.unclaimed_count() == 0) return SessionStatus::Aborted;
  return SessionStatus::AwaitingHuman;
}

}  // namespace

GameService::GameService(std::unique_ptr<SessionStore> store) : store_(std::move(store)) {
  std::random_device rd;
  id_state_[0] = (std::uint64_t{rd()} << 32) ^ rd();
  id_state_[1] = (std::uint64_t{rd()} << 32) ^ rd() ^ static_cast<std::uint64_t>(now_ms());
}

std::string GameService::new_id() {
  std::lock_guard lock(id_mu_);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(splitmix(id_state_[0])),
                static_cast<unsigned long long>(splitmix(id_state_[1])));
  return buf;
}

std::shared_ptr<std::mutex> GameService::lock_for(const std::string& id) {
  std::lock_guard lock(map_mu_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

Session GameService::load(const std::string& id) {
  const auto text = store_->get(id);
  if (!text) throw ServiceError(ServiceErrorCode::UnknownSession, "no session " + id);
  Record rec;
  try {
    rec = decode(*text);
  } catch (const std::exception& e) {
    throw ServiceError(ServiceErrorCode::StoreFailure, "corrupt session record: " + std::string(e.what()));
  }

  // The board and the strategy state are rebuilt by replay; every recorded
  // engine move must be what the strategy plays from that position.
  Session s;
  s.id = id;
  s.history = rec.history;
  s.board = ColoredBoard(rec.history.board_size);
  s.created_ms = rec.created_ms;
  s.updated_ms = rec.updated_ms;
  for (const Move& m : rec.history.moves) {
    if (m.player == Player::First) {
      const StrategyDecision d = fp_move(s.board, s.state);
      if (d.edge != m.edge) {
        throw ServiceError(ServiceErrorCode::EngineFault,
                           "stored engine move " + to_string(m.edge) + " differs from replay " +
                               to_string(d.edge));
      }
      s.state = d.next_state;
      s.last_engine_move = EngineMove{d.edge, d.reason};
      ++s.engine_moves;
    }
    s.board.claim(m);
  }
  if (s.board != replay(s.history)) {
    throw ServiceError(ServiceErrorCode::EngineFault, "history does not replay to the board");
  }
  s.status = derive_status(s.board, rec.aborted);
  return s;
}

void GameService::save(const Session& s) { store_->put(s.id, encode(s)); }

void GameService::engine_reply(Session& s) {
  StrategyDecision d;
  try {
    d = fp_move(s.board, s.state);
  } catch (const std::exception&) {
    // Small boards can exhaust fresh vertices; the game ends without a verdict.
    s.status = SessionStatus::Aborted;
    return;
  }
  if (!s.board.is_unclaimed(d.edge)) {
    s.status = SessionStatus::Aborted;
    save(s);
    throw ServiceError(ServiceErrorCode::EngineFault,
                       "engine chose claimed edge " + to_string(d.edge));
  }
  const Move m{Player::First, d.edge};
  s.board.claim(m);
  s.history.moves.push_back(m);
  s.state = d.next_state;
  s.last_engine_move = EngineMove{d.edge, d.reason};
  ++s.engine_moves;
  s.status = derive_status(s.board, false);
  if (s.status == SessionStatus::AwaitingHuman && s.engine_moves >= kEngineMoveCeiling) {
    s.status = SessionStatus::Aborted;
    save(s);
    throw ServiceError(ServiceErrorCode::EngineFault,
                       "engine made " + std::to_string(s.engine_moves) + " moves without winning");
  }
}

Session GameService::create_session(int n) {
  if (n < 5 || n > kMaxVertices) {
    throw ServiceError(ServiceErrorCode::InvalidSize,
                       "board size must be in [5, 64], got " + std::to_string(n));
  }
  Session s;
  s.id = new_id();
  s.history.board_size = n;
  s.board = ColoredBoard(n);
  s.created_ms = s.updated_ms = now_ms();
  auto mu = lock_for(s.id);
  std::lock_guard lock(*mu);
  engine_reply(s);
  save(s);
  return s;
}

MoveResult GameService::submit_move(const std::string& id, Edge edge) {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  Session s = load(id);
  if (s.status != SessionStatus::AwaitingHuman) {
    throw ServiceError(ServiceErrorCode::NotYourTurn,
                       std::string("game is over: ") + to_string(s.status));
  }
  const int n = s.board.size();
  if (edge.u == edge.v || edge.v >= n) {
    throw ServiceError(ServiceErrorCode::InvalidMove,
                       "no edge " + to_string(edge) + " on K" + std::to_string(n));
  }
  if (!s.board.is_unclaimed(edge)) {
    throw ServiceError(ServiceErrorCode::AlreadyClaimed, to_string(edge) + " is already claimed");
  }
  const Move human{Player::Second, edge};
  s.board.claim(human);
  s.history.moves.push_back(human);
  s.updated_ms = now_ms();
  s.status = derive_status(s.board, false);

  MoveResult r;
  r.human_move = edge;
  if (s.status == SessionStatus::AwaitingHuman) {
    engine_reply(s);
    if (s.history.moves.back().player == Player::First) r.engine_move = s.last_engine_move;
  }
  save(s);
  r.session = std::move(s);
  return r;
}

Session GameService::get(const std::string& id) {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  return load(id);
}

void GameService::remove(const std::string& id) {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  if (!store_->erase(id)) throw ServiceError(ServiceErrorCode::UnknownSession, "no session " + id);
  std::lock_guard map_lock(map_mu_);
  locks_.erase(id);
}

std::string GameService::session_json(const Session& s) { return session_doc(s).dump(); }

std::string GameService::move_json(const MoveResult& r) {
  json doc = {{"human_move", edge_json(r.human_move)},
              {"engine_move", engine_move_json(r.engine_move)},
              {"session", session_doc(r.session)}};
  return doc.dump();
}

std::string GameService::analysis_json(const Session& s) {
  json promising = json::array();
  for (int t = 1; t <= 6; ++t) {
    const auto& f = builtin_fixture("promising-" + std::to_string(t));
    const auto emb = match_pattern(s.board, f);
    if (!emb) continue;
    json names = json::object();
    for (std::size_t i = 0; i < f.vertices.size(); ++i) names[f.vertices[i]] = (*emb)[i];
    promising.push_back({{"type", t},
                         {"fixture", f.name},
                         {"embedding", names},
                         {"precondition", lemma_precondition(s.board, f, *emb)}});
  }
  json doc = {{"id", s.id},
              {"status", to_string(s.status)},
              {"stage", to_string(s.state.stage)},
              {"labels", labels_json(s.state)},
              {"threats",
               {{"fp", threats_json(s.board, Player::First)},
                {"sp", threats_json(s.board, Player::Second)}}},
              {"threat_seeds",
               {{"fp", seeds_json(s.board, Player::First)},
                {"sp", seeds_json(s.board, Player::Second)}}},
              {"promising", promising}};
  return doc.dump();
}

std::string GameService::error_json(ServiceErrorCode code, const std::string& message) {
  return json{{"code", to_string(code)}, {"message", message}}.dump();
}

namespace {

int http_status(ServiceErrorCode c) {
  switch (c) {
    case ServiceErrorCode::InvalidSize:
    case ServiceErrorCode::InvalidMove: return 400;
    case ServiceErrorCode::UnknownSession: return 404;
    case ServiceErrorCode::NotYourTurn:
    case ServiceErrorCode::AlreadyClaimed: return 409;
    case ServiceErrorCode::EngineFault:
    case ServiceErrorCode::StoreFailure: return 500;
  }
  return 500;
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const ServiceError& e) {
    res.status = http_status(e.code());
    res.set_content(GameService::error_json(e.code(), e.what()), "application/json");
  } catch (const json::exception& e) {
    res.status = 400;
    res.set_content(GameService::error_json(ServiceErrorCode::InvalidMove,
                                            std::string("bad request body: ") + e.what()),
                    "application/json");
  }
}

int int_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ServiceError(ServiceErrorCode::InvalidMove, std::string(key) + " must be an integer");
  return v.get<int>();
}

}  // namespace

void mount_routes(httplib::Server& server, GameService& service) {
  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = req.body.empty() ? json::object() : json::parse(req.body);
      const int n = body.contains("n") ? int_field(body, "n") : kDefaultBoardSize;
      const Session s = service.create_session(n);
      res.status = 201;
      res.set_content(GameService::session_json(s), "application/json");
    });
  });
  server.Post(R"(/sessions/([0-9a-f]+)/moves)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const json body = json::parse(req.body);
                  const int u = int_field(body, "u");
                  const int v = int_field(body, "v");
                  if (u < 0 || v < 0 || u >= kMaxVertices || v >= kMaxVertices || u == v) {
                    throw ServiceError(ServiceErrorCode::InvalidMove, "vertex out of range");
                  }
                  const auto r = service.submit_move(req.matches[1], Edge(u, v));
                  res.set_content(GameService::move_json(r), "application/json");
                });
              });
  server.Get(R"(/sessions/([0-9a-f]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.set_content(GameService::session_json(service.get(req.matches[1])), "application/json");
    });
  });
  server.Get(R"(/sessions/([0-9a-f]+)/analysis)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 res.set_content(GameService::analysis_json(service.get(req.matches[1])),
                                 "application/json");
               });
             });
  server.Delete(R"(/sessions/([0-9a-f]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      service.remove(req.matches[1]);
      res.status = 204;
    });
  });
}

}  // namespace k4

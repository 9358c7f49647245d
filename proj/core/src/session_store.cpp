#include <sqlite3.h>

#include <mutex>

#include "k4/service.hpp"

namespace k4 {

namespace {

class SqliteStore final : public SessionStore {
 public:
  explicit SqliteStore(const std::string& path) {
    if (sqlite3_open_v2(path.c_str(), &db_,
                        SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
      const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw ServiceError(ServiceErrorCode::StoreFailure, "cannot open store: " + msg);
    }
    exec("PRAGMA journal_mode=WAL");
    exec("CREATE TABLE IF NOT EXISTS sessions (id TEXT PRIMARY KEY, record TEXT NOT NULL)");
  }

  ~SqliteStore() override { sqlite3_close(db_); }

  std::optional<std::string> get(const std::string& id) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "SELECT record FROM sessions WHERE id = ?1");
    sqlite3_bind_text(st.s, 1, id.c_str(), -1, SQLITE_TRANSIENT);
    const int rc = sqlite3_step(st.s);
    if (rc == SQLITE_ROW) {
      const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(st.s, 0));
      return std::string(text ? text : "");
    }
    if (rc != SQLITE_DONE) fail("read");
    return std::nullopt;
  }

  void put(const std::string& id, const std::string& record) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "INSERT OR REPLACE INTO sessions (id, record) VALUES (?1, ?2)");
    sqlite3_bind_text(st.s, 1, id.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_text(st.s, 2, record.c_str(), -1, SQLITE_TRANSIENT);
    if (sqlite3_step(st.s) != SQLITE_DONE) fail("write");
  }

  bool erase(const std::string& id) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "DELETE FROM sessions WHERE id = ?1");
    sqlite3_bind_text(st.s, 1, id.c_str(), -1, SQLITE_TRANSIENT);
    if (sqlite3_step(st.s) != SQLITE_DONE) fail("delete");
    return sqlite3_changes(db_) > 0;
  }

 private:
  struct Stmt {
    sqlite3_stmt* s = nullptr;
    Stmt(sqlite3* db, const char* sql) {
      if (sqlite3_prepare_v2(db, sql, -1, &s, nullptr) != SQLITE_OK) {
        throw ServiceError(ServiceErrorCode::StoreFailure, sqlite3_errmsg(db));
      }
    }
    ~Stmt() { sqlite3_finalize(s); }
  };

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      const std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw ServiceError(ServiceErrorCode::StoreFailure, msg);
    }
  }

  [[noreturn]] void fail(const char* what) {
    throw ServiceError(ServiceErrorCode::StoreFailure,
                       std::string("store ") + what + " failed: " + sqlite3_errmsg(db_));
  }

  sqlite3* db_ = nullptr;
  std::mutex mu_;
};

}  // namespace

std::unique_ptr<SessionStore> open_sqlite_store(const std::string& path) {
  return std::make_unique<SqliteStore>(path);
}

}  // namespace k4

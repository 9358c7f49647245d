// Command-line front end: verification runs, fixture replay, canonical
// codes, a terminal game and the HTTP server.

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "k4/canon.hpp"
#include "k4/history.hpp"
#include "k4/patterns.hpp"
#include "k4/replay.hpp"
#include "k4/service.hpp"
#include "k4/verifier.hpp"

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kLimit = 3 };

struct VerifyArgs {
  int n = k4::kDefaultBoardSize;
  std::string mode = "paper";
  int bound = 21;
  int workers = 1;
  std::uint64_t budget_nodes = 0;
  double budget_seconds = 0;
  std::size_t cache_entries = std::size_t{1} << 21;
  bool no_cache = false;
  bool quiet = false;
  std::string report;
};

void add_verify_flags(CLI::App* cmd, VerifyArgs& a, bool k3) {
  cmd->add_option("--n", a.n, "board size")->envname("K4_BOARD_SIZE")->check(CLI::Range(4, 64));
  if (!k3) {
    cmd->add_option("--mode", a.mode, "paper or full")
        ->check(CLI::IsMember({"paper", "full"}));
    cmd->add_option("--bound", a.bound, "first-player move bound")->check(CLI::Range(1, 200));
  }
  cmd->add_option("--workers", a.workers, "search threads")
      ->envname("K4_WORKERS")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--budget-nodes", a.budget_nodes, "stop after this many nodes (0 = none)");
  cmd->add_option("--budget-seconds", a.budget_seconds, "stop after this many seconds (0 = none)");
  cmd->add_option("--cache-entries", a.cache_entries, "transposition table slots")
      ->envname("K4_CACHE_ENTRIES");
  cmd->add_flag("--no-cache", a.no_cache, "disable the transposition table");
  cmd->add_flag("--quiet", a.quiet, "no progress output");
  cmd->add_option("--report", a.report, "write the JSON report here");
}

k4::VerifyOptions options_from(const VerifyArgs& a) {
  k4::VerifyOptions o;
  o.mode = a.mode == "full" ? k4::VerifyMode::Full : k4::VerifyMode::PaperRestricted;
  o.fp_move_bound = a.bound;
  o.workers = a.workers;
  o.budget_nodes = a.budget_nodes;
  o.budget_seconds = a.budget_seconds;
  o.use_cache = !a.no_cache;
  o.cache_entries = a.cache_entries;
  if (!a.quiet) {
    o.progress = [](const k4::ProgressInfo& p) {
      std::fprintf(stderr, "[%8.1fs] nodes %llu  cache hits %llu  stored %llu\n", p.seconds,
                   static_cast<unsigned long long>(p.nodes),
                   static_cast<unsigned long long>(p.cache_hits),
                   static_cast<unsigned long long>(p.stored));
    };
  }
  return o;
}

int finish(const k4::VerificationReport& r, const std::string& report_path) {
  const std::string doc = k4::to_json(r);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "cannot write " << report_path << "\n";
      return kUsage;
    }
    out << doc << "\n";
  }
  std::cout << doc << "\n";
  switch (r.outcome) {
    case k4::Outcome::Verified: return kOk;
    case k4::Outcome::CounterexampleFound: return kFail;
    case k4::Outcome::ResourceLimit: return kLimit;
  }
  return kFail;
}

int run_replay(const std::vector<std::string>& paths) {
  int failures = 0;
  for (const auto& path : paths) {
    k4::ScriptFixture f;
    try {
      f = k4::load_fixture(path);
    } catch (const std::exception& e) {
      std::cout << "FAIL " << path << ": " << e.what() << "\n";
      ++failures;
      continue;
    }
    k4::FixtureRun run;
    try {
      run = k4::run_fixture(f);
    } catch (const k4::ScriptError& e) {
      std::cout << "FAIL " << f.name << ": " << e.what() << "\n";
      ++failures;
      continue;
    }
    std::cout << (run.passed ? "PASS " : "FAIL ") << f.name << " (" << run.results.size()
              << " assertions)\n";
    for (const auto& r : run.results) {
      if (!r.passed) {
        std::cout << "  line " << r.assertion.line << ": " << k4::describe(r.assertion) << ": "
                  << r.detail << "\n";
      }
    }
    if (!run.passed) ++failures;
  }
  return failures == 0 ? kOk : kFail;
}

int run_canon(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    return kUsage;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const auto board = k4::replay(k4::parse_script(ss.str()));
  std::cout << k4::canonical_code(board).hex() << "\n";
  return kOk;
}

void render(const k4::Session& s) {
  const auto& b = s.board;
  const int n = b.size();
  std::cout << "\n    ";
  for (int v = 0; v < n; ++v) std::cout << (v % 10);
  std::cout << "\n";
  for (int u = 0; u < n; ++u) {
    std::printf("%3d ", u);
    for (int v = 0; v < n; ++v) {
      char c = '.';
      if (u == v) {
        c = ' ';
      } else if (b.at(u, v) == k4::EdgeState::First) {
        c = 'F';
      } else if (b.at(u, v) == k4::EdgeState::Second) {
        c = 'S';
      }
      std::cout << c;
    }
    std::cout << "\n";
  }
  std::cout.flush();
  if (s.last_engine_move) {
    std::cout << "engine: " << k4::to_string(s.last_engine_move->edge) << " ("
              << k4::to_string(s.last_engine_move->reason) << ")\n";
  }
  for (const auto& t : k4::threats(b, k4::Player::First)) {
    std::cout << "  engine threatens " << k4::to_string(t.missing_edge) << "\n";
  }
}

int run_play(int n) {
  k4::GameService service(k4::open_sqlite_store(":memory:"));
  k4::Session s = service.create_session(n);
  render(s);
  std::string line;
  while (s.status == k4::SessionStatus::AwaitingHuman) {
    std::cout << "your move (u-v, q to quit): " << std::flush;
    if (!std::getline(std::cin, line) || line == "q") return kOk;
    int u = -1;
    int v = -1;
    char dash = 0;
    std::istringstream ls(line);
    if (!(ls >> u >> dash >> v) || dash != '-' || u < 0 || v < 0 || u >= n || v >= n || u == v) {
      std::cout << "expected u-v with distinct vertices below " << n << "\n";
      continue;
    }
    try {
      s = service.submit_move(s.id, k4::Edge(u, v)).session;
    } catch (const k4::ServiceError& e) {
      std::cout << k4::to_string(e.code()) << ": " << e.what() << "\n";
      continue;
    }
    render(s);
  }
  std::cout << k4::to_string(s.status) << " after " << s.engine_moves << " engine moves\n";
  return kOk;
}

httplib::Server* g_server = nullptr;

int run_serve(const std::string& host, int port, const std::string& store) {
  k4::GameService service(k4::open_sqlite_store(store));
  httplib::Server server;
  k4::mount_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "listening on " << host << ":" << port << " (store " << store << ")\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K4 building game: strategy verification and play"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "exhaustively check the K4 strategy");
  add_verify_flags(verify, va, false);

  VerifyArgs ka;
  ka.n = 5;
  auto* verify_k3 = app.add_subcommand("verify-k3", "exhaustively check the K3 script");
  add_verify_flags(verify_k3, ka, true);

  int play_n = k4::kDefaultBoardSize;
  auto* play = app.add_subcommand("play", "play the second player in the terminal");
  play->add_option("--n", play_n, "board size")->envname("K4_BOARD_SIZE")->check(CLI::Range(5, 64));

  std::vector<std::string> fixtures;
  auto* replay = app.add_subcommand("replay", "run move-script fixtures and their assertions");
  replay->add_option("fixtures", fixtures, "*.game files")->required()->check(CLI::ExistingFile);

  std::string canon_path;
  auto* canon = app.add_subcommand("canon", "canonical code of a move script's final board");
  canon->add_option("script", canon_path, "*.game file")->required()->check(CLI::ExistingFile);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "k4sessions.db";
  auto* serve = app.add_subcommand("serve", "HTTP game service");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "TCP port")->envname("K4_PORT")->check(CLI::Range(0, 65535));
  serve->add_option("--store", store, "SQLite session store")->envname("K4_STORE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) return finish(k4::verify(va.n, options_from(va)), va.report);
    if (*verify_k3) return finish(k4::verify_k3(ka.n, options_from(ka)), ka.report);
    if (*play) return run_play(play_n);
    if (*replay) return run_replay(fixtures);
    if (*canon) return run_canon(canon_path);
    if (*serve) return run_serve(host, port, store);
  } catch (const k4::ScriptError& e) {
    std::cerr << "script error: " << e.what() << "\n";
    return kUsage;
  } catch (const k4::ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}

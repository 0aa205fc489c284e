#include "engine.hpp"

#include "imtriage/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#ifdef IMTRIAGE_HAVE_SQLITE3
#include <sqlite3.h>
#endif

namespace imtriage::fixture {

namespace fs = std::filesystem;

namespace {

#ifdef IMTRIAGE_HAVE_SQLITE3
class LibraryEngine final : public SqlEngine {
 public:
  void run(const fs::path& database, std::string_view script) const override {
    sqlite3* db = nullptr;
    if (sqlite3_open_v2(database.c_str(), &db, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE,
                        nullptr) != SQLITE_OK) {
      const std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
      sqlite3_close(db);
      throw Error(ErrorCode::Io, "cannot create '" + database.string() + "': " + msg);
    }
    char* err = nullptr;
    const std::string sql(script);
    const int rc = sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err);
    const std::string msg = err ? err : "";
    sqlite3_free(err);
    sqlite3_close(db);
    if (rc != SQLITE_OK) {
      throw Error(ErrorCode::InvalidScenario,
                  "script for '" + database.string() + "' failed: " + msg);
    }
  }
  std::string version() const override { return sqlite3_libversion(); }
};
#endif

bool on_path(const char* exe) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string_view rest(path);
  while (!rest.empty()) {
    const auto colon = rest.find(':');
    const fs::path dir(std::string(rest.substr(0, colon)));
    std::error_code ec;
    if (!dir.empty() && fs::is_regular_file(dir / exe, ec)) return true;
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return false;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

class CliEngine final : public SqlEngine {
 public:
  void run(const fs::path& database, std::string_view script) const override {
    const fs::path sql = database.string() + ".sql.tmp";
    {
      std::ofstream f(sql, std::ios::binary);
      f.write(script.data(), static_cast<std::streamsize>(script.size()));
    }
    const std::string cmd = "sqlite3 -bail " + shell_quote(database.string()) + " < " +
                            shell_quote(sql.string());
    const int rc = std::system(cmd.c_str());
    fs::remove(sql);
    if (rc != 0) {
      throw Error(ErrorCode::InvalidScenario, "sqlite3 failed for '" + database.string() + "'");
    }
  }
  std::string version() const override {
    std::string out;
    if (FILE* p = popen("sqlite3 -version", "r")) {
      char buf[128];
      while (std::fgets(buf, sizeof buf, p)) out += buf;
      pclose(p);
    }
    return out.substr(0, out.find(' '));
  }
};

}  // namespace

EngineChoice parse_engine_choice(std::string_view name) {
  if (name == "auto") return EngineChoice::Auto;
  if (name == "library") return EngineChoice::Library;
  if (name == "cli") return EngineChoice::Cli;
  if (name == "none") return EngineChoice::None;
  throw Error(ErrorCode::InvalidScenario,
              "unknown engine '" + std::string(name) + "' (expected auto, library, cli or none)");
}

std::unique_ptr<SqlEngine> make_engine(EngineChoice choice) {
#ifdef IMTRIAGE_HAVE_SQLITE3
  if (choice == EngineChoice::Auto || choice == EngineChoice::Library) {
    return std::make_unique<LibraryEngine>();
  }
#endif
  if ((choice == EngineChoice::Auto || choice == EngineChoice::Cli) && on_path("sqlite3")) {
    return std::make_unique<CliEngine>();
  }
  throw Error(ErrorCode::EngineUnavailable,
              "no SQLite engine available; use the committed golden fixtures");
}

}  // namespace imtriage::fixture

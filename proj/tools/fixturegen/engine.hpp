#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace imtriage::fixture {

// Executes SQL scripts with a standard SQLite implementation.
class SqlEngine {
 public:
  virtual ~SqlEngine() = default;
  // Creates `database` (which must not exist) and runs `script` in it.
  virtual void run(const std::filesystem::path& database, std::string_view script) const = 0;
  // Library version string, e.g. "3.45.1".
  virtual std::string version() const = 0;
};

enum class EngineChoice { Auto, Library, Cli, None };
EngineChoice parse_engine_choice(std::string_view name);

// Errors: EngineUnavailable when the requested backend is missing (always
// for None).
std::unique_ptr<SqlEngine> make_engine(EngineChoice choice = EngineChoice::Auto);

}  // namespace imtriage::fixture

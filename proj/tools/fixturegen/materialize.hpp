#pragma once

#include "engine.hpp"
#include "generator.hpp"

#include <filesystem>
#include <string>

namespace imtriage::fixture {

// Writes the fixture's files and databases under `root` (which must be
// absent or empty), then completes the expected report with the tree
// digest and digest-derived case id. Returns the expected report JSON.
// Errors: EngineUnavailable, Io, InvalidScenario (a script failed).
std::string materialize(Fixture& fixture, const std::filesystem::path& root,
                        const SqlEngine& engine);

}  // namespace imtriage::fixture

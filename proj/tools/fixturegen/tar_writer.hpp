#pragma once

#include <cstdint>
#include <filesystem>

namespace imtriage::fixture {

// Writes the directory tree under `root` as an uncompressed POSIX tar with
// members in byte order of their relative paths. Owner, group, and mode are
// fixed and every mtime is `mtime`, so equal trees give equal archives.
// Paths longer than the ustar name field use a pax extended header.
void write_tar(const std::filesystem::path& root, const std::filesystem::path& archive,
               std::int64_t mtime);

}  // namespace imtriage::fixture

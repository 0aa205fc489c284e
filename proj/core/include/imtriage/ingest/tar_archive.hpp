#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace imtriage::ingest {

enum class TarMemberKind { File, Directory, Symlink, HardLink };

struct TarMember {
  std::string path;          // as stored (pax/GNU long names applied), not normalized
  TarMemberKind kind = TarMemberKind::File;
  std::uint64_t data_offset = 0;
  std::uint64_t size = 0;
  std::string link_target;
  std::int64_t mtime = 0;
};

// Walks a POSIX ustar/pax archive (GNU long-name records are honoured too)
// and returns its members in archive order. Header checksums are verified.
//
// Errors: UnsupportedContainer when the first block is not a tar header;
// CorruptArchive with the failing offset for any later structural fault.
std::vector<TarMember> read_tar_index(const std::filesystem::path& archive);

// True when the first 512 bytes form a checksum-valid tar header (or the
// archive is a bare end-of-archive marker).
bool looks_like_tar(const std::filesystem::path& file);

}  // namespace imtriage::ingest

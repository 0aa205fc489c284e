#include "imtriage/sqlite/database.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_set>

namespace imtriage::sqlite {

namespace {

// ---------------------------------------------------------------------------
// Access instrumentation

struct ObserverRegistry {
  std::mutex mu;
  std::uint64_t next_id = 1;
  std::map<std::uint64_t, AccessObserver> observers;
};

ObserverRegistry& registry() {
  static ObserverRegistry r;
  return r;
}

void notify_access(std::string_view label) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  for (auto& [id, fn] : r.observers) fn(label);
}

// ---------------------------------------------------------------------------

constexpr std::uint8_t kInteriorIndex = 0x02;
constexpr std::uint8_t kInteriorTable = 0x05;
constexpr std::uint8_t kLeafIndex = 0x0A;
constexpr std::uint8_t kLeafTable = 0x0D;

std::uint32_t be16(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 8) | b[off + 1];
}

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | b[off + 3];
}

// Internal signal carrying a damage classification out of the walk loop.
struct WalkFault {
  ErrorCode kind;
  std::uint32_t page;
  std::string detail;
};

bool is_ptrmap_page(const DbHeader& h, std::uint32_t page) {
  if (h.largest_root_page == 0 || page < 2) return false;
  const std::uint32_t span = h.usable_size() / 5 + 1;
  return (page - 2) % span == 0;
}

}  // namespace

ScopedAccessObserver::ScopedAccessObserver(AccessObserver observer) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  id_ = r.next_id++;
  r.observers.emplace(id_, std::move(observer));
}

ScopedAccessObserver::~ScopedAccessObserver() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.observers.erase(id_);
}

std::optional<DbHeader> sniff_header(const ByteSource& source) {
  notify_access(source.label());
  std::array<std::uint8_t, kHeaderSize> buf{};
  const auto n = source.read_at(0, buf);
  try {
    return parse_header(std::span<const std::uint8_t>(buf.data(), n));
  } catch (const Error&) {
    return std::nullopt;
  }
}

Database::Database(std::shared_ptr<const ByteSource> source, DbHeader header,
                   std::uint32_t available)
    : source_(std::move(source)), header_(header), available_pages_(available) {}

Database Database::open(std::shared_ptr<const ByteSource> source) {
  notify_access(source->label());
  std::array<std::uint8_t, kHeaderSize> buf{};
  const auto n = source->read_at(0, buf);
  DbHeader h = parse_header(std::span<const std::uint8_t>(buf.data(), n));
  const std::uint64_t length = source->size();
  const auto available = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(length / h.page_size, 0xFFFFFFFFu));
  if (available == 0) {
    throw Error(ErrorCode::TruncatedFile, "file is shorter than one page");
  }
  if (!h.in_header_count_valid) h.page_count = available;
  return Database(std::move(source), h, available);
}

namespace {

class PageReader {
 public:
  PageReader(const ByteSource& src, const DbHeader& h, std::uint32_t available)
      : src_(src), h_(h), available_(available) {}

  std::vector<std::uint8_t> load(std::uint32_t page) const {
    if (page == 0 || page > h_.page_count) {
      throw WalkFault{ErrorCode::CorruptPage, page,
                      "page number " + std::to_string(page) + " outside 1.." +
                          std::to_string(h_.page_count)};
    }
    if (page > available_) {
      throw WalkFault{ErrorCode::TruncatedFile, page,
                      "page " + std::to_string(page) + " lies beyond the end of the file (" +
                          std::to_string(available_) + " pages present)"};
    }
    std::vector<std::uint8_t> buf(h_.page_size);
    const auto got = src_.read_at(std::uint64_t{page - 1} * h_.page_size, buf);
    if (got != buf.size()) {
      throw WalkFault{ErrorCode::TruncatedFile, page, "short read"};
    }
    return buf;
  }

 private:
  const ByteSource& src_;
  const DbHeader& h_;
  std::uint32_t available_;
};

// Reassembles a leaf cell payload, following the overflow chain if needed.
std::vector<std::uint8_t> leaf_payload(const PageReader& pages, const DbHeader& h,
                                       std::span<const std::uint8_t> page, std::uint32_t page_no,
                                       std::size_t at, std::uint64_t payload_size) {
  const std::uint64_t usable = h.usable_size();
  const std::uint64_t max_local = usable - 35;
  std::uint64_t local = payload_size;
  if (payload_size > max_local) {
    const std::uint64_t min_local = ((usable - 12) * 32 / 255) - 23;
    const std::uint64_t k = min_local + ((payload_size - min_local) % (usable - 4));
    local = k <= max_local ? k : min_local;
  }
  const bool spills = local < payload_size;
  if (at + local + (spills ? 4 : 0) > usable) {
    throw WalkFault{ErrorCode::CorruptPage, page_no, "cell payload overruns page"};
  }
  std::vector<std::uint8_t> out(page.begin() + static_cast<std::ptrdiff_t>(at),
                                page.begin() + static_cast<std::ptrdiff_t>(at + local));
  if (!spills) return out;
  out.reserve(payload_size);

  std::uint32_t next = be32(page, at + local);
  std::unordered_set<std::uint32_t> seen;
  while (out.size() < payload_size) {
    if (next == 0) {
      throw WalkFault{ErrorCode::CorruptPage, page_no,
                      "overflow chain ends after " + std::to_string(out.size()) + " of " +
                          std::to_string(payload_size) + " bytes"};
    }
    if (!seen.insert(next).second) {
      throw WalkFault{ErrorCode::CyclicOverflow, next,
                      "overflow chain revisits page " + std::to_string(next)};
    }
    const auto ovf = pages.load(next);
    const std::uint64_t take = std::min<std::uint64_t>(usable - 4, payload_size - out.size());
    out.insert(out.end(), ovf.begin() + 4, ovf.begin() + 4 + static_cast<std::ptrdiff_t>(take));
    next = be32(ovf, 0);
  }
  return out;
}

}  // namespace

WalkResult Database::walk_table(std::uint32_t root_page, const RowVisitor& visit) const {
  const PageReader pages(*source_, header_, available_pages_);
  WalkResult result;
  std::optional<std::int64_t> last_rowid;

  auto fail = [&](const WalkFault& f) {
    result.damage = DamageReport{f.kind, f.page, f.detail, result.rows, last_rowid};
  };

  // Root page type decides whether this is a table b-tree at all.
  try {
    const auto root = pages.load(root_page);
    const std::uint8_t type = root[root_page == 1 ? kHeaderSize : 0];
    if (type == kInteriorIndex || type == kLeafIndex) {
      throw Error(ErrorCode::UnsupportedFeature,
                  "page " + std::to_string(root_page) +
                      " roots an index b-tree (indices and WITHOUT ROWID tables are not read)");
    }
  } catch (const WalkFault& f) {
    fail(f);
    return result;
  }

  std::vector<std::uint32_t> stack{root_page};
  std::unordered_set<std::uint32_t> visited;
  try {
    while (!stack.empty()) {
      const std::uint32_t page_no = stack.back();
      stack.pop_back();
      if (!visited.insert(page_no).second) {
        throw WalkFault{ErrorCode::CorruptPage, page_no,
                        "b-tree page " + std::to_string(page_no) + " referenced twice"};
      }
      if (is_ptrmap_page(header_, page_no)) {
        throw WalkFault{ErrorCode::UnsupportedFeature, page_no,
                        "b-tree pointer leads to pointer-map page " + std::to_string(page_no)};
      }
      const auto page = pages.load(page_no);
      const std::size_t hdr = page_no == 1 ? kHeaderSize : 0;
      const std::uint8_t type = page[hdr];
      if (type != kLeafTable && type != kInteriorTable) {
        throw WalkFault{ErrorCode::CorruptPage, page_no,
                        "unexpected b-tree page type 0x" + [&] {
                          static constexpr char kHex[] = "0123456789abcdef";
                          return std::string{kHex[type >> 4], kHex[type & 0xF]};
                        }()};
      }
      const bool leaf = type == kLeafTable;
      const std::uint32_t cells = be16(page, hdr + 3);
      const std::size_t ptrs = hdr + (leaf ? 8 : 12);
      const std::size_t usable = header_.usable_size();
      if (ptrs + 2 * std::size_t{cells} > usable) {
        throw WalkFault{ErrorCode::CorruptPage, page_no,
                        "cell pointer array of " + std::to_string(cells) + " cells overruns page"};
      }

      if (!leaf) {
        std::vector<std::uint32_t> children;
        children.reserve(cells + 1);
        for (std::uint32_t c = 0; c < cells; ++c) {
          const std::size_t at = be16(page, ptrs + 2 * c);
          if (at < ptrs + 2 * std::size_t{cells} || at + 4 > usable) {
            throw WalkFault{ErrorCode::CorruptPage, page_no,
                            "cell " + std::to_string(c) + " offset out of range"};
          }
          children.push_back(be32(page, at));
        }
        children.push_back(be32(page, hdr + 8));
        for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
        continue;
      }

      for (std::uint32_t c = 0; c < cells; ++c) {
        std::size_t at = be16(page, ptrs + 2 * c);
        if (at < ptrs + 2 * std::size_t{cells} || at >= usable) {
          throw WalkFault{ErrorCode::CorruptPage, page_no,
                          "cell " + std::to_string(c) + " offset out of range"};
        }
        const std::span<const std::uint8_t> body(page.data(), usable);
        Varint psize;
        Varint rowid;
        try {
          psize = read_varint(body, at);
          rowid = read_varint(body, at + psize.length);
        } catch (const Error& e) {
          throw WalkFault{ErrorCode::CorruptPage, page_no, e.what()};
        }
        at += psize.length + rowid.length;
        auto payload = leaf_payload(pages, header_, page, page_no, at, psize.value);
        RecordRow row;
        row.rowid = static_cast<std::int64_t>(rowid.value);
        try {
          auto rec = decode_record(payload, header_.text_encoding);
          row.cells = std::move(rec.cells);
          row.text_damaged = rec.text_damaged;
        } catch (const Error& e) {
          throw WalkFault{e.code(), page_no,
                          "row " + std::to_string(row.rowid) + ": " + e.what()};
        }
        last_rowid = row.rowid;
        ++result.rows;
        visit(std::move(row));
      }
    }
  } catch (const WalkFault& f) {
    fail(f);
  }
  return result;
}

std::vector<TableSchema> Database::list_tables() const {
  std::vector<TableSchema> out;
  std::string failure;
  const auto walked = walk_table(1, [&](RecordRow&& row) {
    if (row.cells.size() < 5) return;
    const auto* type = std::get_if<std::string>(&row.cells[0]);
    const auto* name = std::get_if<std::string>(&row.cells[1]);
    const auto* root = std::get_if<std::int64_t>(&row.cells[3]);
    const auto* sql = std::get_if<std::string>(&row.cells[4]);
    if (!type || *type != "table" || !name) return;
    TableSchema t;
    t.name = *name;
    t.ddl_text = sql ? *sql : std::string{};
    const auto parsed = parse_create_table(t.ddl_text);
    if (parsed.is_virtual || !root || *root <= 0) return;
    t.root_page = static_cast<std::uint32_t>(*root);
    t.columns = parsed.columns;
    t.without_rowid = parsed.without_rowid;
    out.push_back(std::move(t));
  });
  if (walked.damage) {
    throw Error(ErrorCode::CorruptSchemaPage,
                "schema table unreadable: " + walked.damage->detail);
  }
  std::sort(out.begin(), out.end(),
            [](const TableSchema& a, const TableSchema& b) { return a.name < b.name; });
  return out;
}

std::optional<TableSchema> Database::find_table(std::string_view name) const {
  for (auto& t : list_tables()) {
    if (t.name == name) return t;
  }
  return std::nullopt;
}

TableRows Database::read_table(const TableSchema& table) const {
  if (table.without_rowid) {
    throw Error(ErrorCode::UnsupportedFeature,
                "table '" + table.name + "' is WITHOUT ROWID");
  }
  TableRows out;
  out.schema = table;
  std::vector<std::size_t> stored;  // column index for each record slot
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i].stored) stored.push_back(i);
  }
  const std::size_t width = table.columns.size();
  const auto walked = walk_table(table.root_page, [&](RecordRow&& raw) {
    if (width == 0) {
      out.rows.push_back(std::move(raw));
      return;
    }
    RecordRow row;
    row.rowid = raw.rowid;
    row.text_damaged = raw.text_damaged;
    row.cells.assign(std::max(width, raw.cells.size()), CellValue{Null{}});
    for (std::size_t slot = 0; slot < raw.cells.size(); ++slot) {
      const std::size_t col = slot < stored.size() ? stored[slot] : slot;
      row.cells[col] = std::move(raw.cells[slot]);
    }
    for (std::size_t i = 0; i < width; ++i) {
      if (table.columns[i].rowid_alias && std::holds_alternative<Null>(row.cells[i])) {
        row.cells[i] = row.rowid;
      }
    }
    out.rows.push_back(std::move(row));
  });
  out.damage = walked.damage;
  return out;
}

}  // namespace imtriage::sqlite

#include "engine.hpp"

#include "imtriage/integrity.hpp"
#include "imtriage/locator.hpp"
#include "imtriage/pipeline.hpp"
#include "imtriage/sqlite/database.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace imtriage;

namespace {

const ingest::ExtractionTree& golden() {
  static const auto tree = ingest::ExtractionTree::open(IMTRIAGE_GOLDEN_TAR);
  return tree;
}

// 10,000-row message table built once with the reference engine.
std::shared_ptr<const ByteSource> large_db() {
  static const auto source = [] {
    const auto path = fs::temp_directory_path() / "imtriage-bench-large.db";
    fs::remove(path);
    fixture::make_engine(fixture::EngineChoice::Library)
        ->run(path,
              "CREATE TABLE messages(_id INTEGER PRIMARY KEY, key_remote_jid TEXT, "
              "key_from_me INTEGER, data TEXT, timestamp INTEGER);"
              "WITH RECURSIVE c(i) AS (SELECT 1 UNION ALL SELECT i+1 FROM c WHERE i < 10000) "
              "INSERT INTO messages SELECT i, '15550100001@s.whatsapp.net', i % 2, "
              "printf('message body number %d', i), 1551450000000 + i * 1000 FROM c;");
    std::ifstream in(path, std::ios::binary);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), {});
    fs::remove(path);
    return make_memory_source(std::move(bytes), "large.db");
  }();
  return source;
}

void BM_ReadVarint(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::uint8_t> buf;
  for (int i = 0; i < 4096; ++i) sqlite::write_varint(rng() >> (rng() % 64), buf);
  for (auto _ : state) {
    std::size_t off = 0;
    std::uint64_t sum = 0;
    while (off < buf.size()) {
      const auto v = sqlite::read_varint(buf, off);
      sum += v.value;
      off += v.length;
    }
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_ReadVarint);

void BM_WalkTable(benchmark::State& state) {
  const auto db = sqlite::Database::open(large_db());
  const auto table = *db.find_table("messages");
  for (auto _ : state) {
    std::uint64_t n = 0;
    db.walk_table(table.root_page, [&](sqlite::RecordRow&& r) { n += r.cells.size(); });
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_WalkTable);

void BM_BuildManifest(benchmark::State& state) {
  integrity::BuildOptions opt;
  opt.created_at_utc = "2019-03-15T00:00:00Z";
  opt.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrity::build_manifest(golden(), opt));
}
BENCHMARK(BM_BuildManifest)->Arg(1)->Arg(4);

void BM_ScanStores(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(locator::scan_stores(golden()));
}
BENCHMARK(BM_ScanStores);

void BM_Pipeline(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(golden()));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bkio/bench.hpp"
#include "bkio/reader.hpp"
#include "bkio/writer.hpp"

using namespace bkio;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bkio-tests";
  fs::create_directories(dir);
  return dir / name;
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return Bytes((std::istreambuf_iterator<char>(in)),
               std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out);
}

// Replaces the footer JSON of a valid container with a mutated version.
void rewrite_footer(const fs::path& path, const nlohmann::json& footer) {
  Bytes bytes = read_file(path);
  const std::uint64_t old_len =
      load_le<std::uint64_t>(bytes.data() + bytes.size() - 12);
  bytes.resize(bytes.size() - 12 - old_len);
  const std::string json = footer.dump();
  bytes.insert(bytes.end(), json.begin(), json.end());
  std::uint8_t len_le[8];
  store_le<std::uint64_t>(len_le, json.size());
  bytes.insert(bytes.end(), len_le, len_le + 8);
  bytes.insert(bytes.end(), kTrailerMagic, kTrailerMagic + 4);
  write_file(path, bytes);
}

std::vector<ColumnCodecConfig> uniform_configs(std::size_t n, CodecId codec,
                                               int level, PrecondId precond) {
  return std::vector<ColumnCodecConfig>(
      n, ColumnCodecConfig{{codec, level, nullptr}, precond});
}

EventBatch two_column_batch(std::uint64_t count, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> len(0, 6);
  EventBatch batch;
  batch.event_count = count;
  batch.columns.resize(2);
  batch.columns[0].fixed.resize(count * 4);
  for (auto& b : batch.columns[0].fixed) b = static_cast<std::uint8_t>(byte(rng));
  batch.columns[1].var.resize(count);
  for (auto& ev : batch.columns[1].var) {
    ev.resize(static_cast<std::size_t>(len(rng)) * 8);
    for (auto& b : ev) b = static_cast<std::uint8_t>(byte(rng));
  }
  return batch;
}

const std::vector<ColumnSchema> kTwoColumns = {
    {"x", ElementType::F32, Arity::Fixed},
    {"hits", ElementType::F64, Arity::Variable},
};

}  // namespace

TEST_CASE("open_writer validates settings") {
  const fs::path path = temp_file("open.bkio");

  CHECK_THROWS_AS(Writer(path, {}, {}, FlushPolicy::only_at_cluster(10)),
                  InvalidSettings);

  auto dict = std::make_shared<Dictionary>();
  auto configs = uniform_configs(2, CodecId::Lz4, 1, PrecondId::None);
  configs[1].settings.dictionary = dict;
  CHECK_THROWS_AS(Writer(path, kTwoColumns, configs,
                         FlushPolicy::only_at_cluster(10)),
                  InvalidSettings);

  CHECK_THROWS_AS(Writer(path, kTwoColumns,
                         uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
                         FlushPolicy::per_basket(512)),
                  InvalidSettings);

  const std::vector<ColumnSchema> dup = {{"x", ElementType::F32, Arity::Fixed},
                                         {"x", ElementType::I32, Arity::Fixed}};
  CHECK_THROWS_AS(Writer(path, dup,
                         uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
                         FlushPolicy::only_at_cluster(10)),
                  InvalidSettings);
}

TEST_CASE("reopening an existing path truncates") {
  const fs::path path = temp_file("truncate.bkio");
  std::mt19937_64 rng(1);
  {
    Writer w(path, kTwoColumns,
             uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
             FlushPolicy::only_at_cluster(100));
    w.append(two_column_batch(500, rng));
    w.close();
  }
  const auto first_size = fs::file_size(path);
  {
    Writer w(path, kTwoColumns,
             uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
             FlushPolicy::only_at_cluster(100));
    w.append(two_column_batch(10, rng));
    w.close();
  }
  CHECK(fs::file_size(path) < first_size);
  Reader reader(path);
  CHECK(reader.footer().total_events == 10);
}

TEST_CASE("schema mismatch on append") {
  const fs::path path = temp_file("mismatch.bkio");
  Writer w(path, kTwoColumns,
           uniform_configs(2, CodecId::Raw, 0, PrecondId::None),
           FlushPolicy::only_at_cluster(100));
  EventBatch bad;
  bad.event_count = 1;
  bad.columns.resize(1);
  CHECK_THROWS_AS(w.append(bad), SchemaMismatch);
}

TEST_CASE("cluster policy flushes at multiples of N") {
  const fs::path path = temp_file("cluster.bkio");
  std::mt19937_64 rng(2);
  Writer w(path, kTwoColumns,
           uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
           FlushPolicy::only_at_cluster(1000));
  w.append(two_column_batch(2500, rng));

  FileFooter footer = w.close();
  CHECK(footer.total_events == 2500);
  CHECK(footer.clusters == std::vector<std::uint64_t>{1000, 2000, 2500});
  // every column flushes exactly one basket per cluster
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t baskets = 0;
    for (const auto& e : footer.directory)
      if (e.column_index == c) ++baskets;
    CHECK(baskets == footer.clusters.size());
  }
}

TEST_CASE("per-basket policy flushes fat columns more often") {
  const fs::path path = temp_file("perbasket.bkio");
  const std::vector<ColumnSchema> schema = {
      {"fat", ElementType::F64, Arity::Fixed},
      {"thin", ElementType::U8, Arity::Fixed},
  };
  Writer w(path, schema, uniform_configs(2, CodecId::Raw, 0, PrecondId::None),
           FlushPolicy::per_basket(4096));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  EventBatch batch;
  batch.event_count = 5000;
  batch.columns.resize(2);
  batch.columns[0].fixed.resize(5000 * 8);
  batch.columns[1].fixed.resize(5000);
  for (auto& b : batch.columns[0].fixed) b = static_cast<std::uint8_t>(byte(rng));
  for (auto& b : batch.columns[1].fixed) b = static_cast<std::uint8_t>(byte(rng));
  w.append(batch);
  FileFooter footer = w.close();

  std::size_t fat = 0, thin = 0;
  for (const auto& e : footer.directory)
    (e.column_index == 0 ? fat : thin)++;
  CHECK(fat > thin);

  // directory partitions the event range per column
  Reader reader(path);
  ColumnChunk col = reader.read_column(0, 0, 5000);
  CHECK(col.fixed == batch.columns[0].fixed);
}

TEST_CASE("close with zero events") {
  const fs::path path = temp_file("empty.bkio");
  Writer w(path, kTwoColumns,
           uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
           FlushPolicy::only_at_cluster(1000));
  FileFooter footer = w.close();
  CHECK(footer.total_events == 0);
  CHECK(footer.directory.empty());
  CHECK(footer.clusters.empty());

  Reader reader(path);
  CHECK(reader.footer().total_events == 0);
}

TEST_CASE("writing is deterministic") {
  std::mt19937_64 rng(4);
  const EventBatch batch = two_column_batch(1500, rng);
  const fs::path a = temp_file("det_a.bkio");
  const fs::path b = temp_file("det_b.bkio");
  for (const fs::path& p : {a, b}) {
    Writer w(p, kTwoColumns,
             uniform_configs(2, CodecId::Zstd, 3, PrecondId::Shuffle),
             FlushPolicy::only_at_cluster(400));
    w.append(batch);
    w.close();
  }
  CHECK(read_file(a) == read_file(b));
}

TEST_CASE("round-trip across codecs and preconds") {
  std::mt19937_64 rng(5);
  const EventBatch batch = two_column_batch(3000, rng);

  for (CodecId codec : {CodecId::Raw, CodecId::Lz4, CodecId::Zstd}) {
    for (PrecondId precond : {PrecondId::None, PrecondId::Shuffle,
                              PrecondId::BitShuffle, PrecondId::ByteStreamSplit}) {
      const fs::path path = temp_file("rt.bkio");
      Writer w(path, kTwoColumns,
               uniform_configs(2, codec, default_level(codec), precond),
               FlushPolicy::only_at_cluster(700));
      w.append(batch);
      w.close();

      Reader reader(path);
      CHECK(reader.read_column(0, 0, 3000).fixed == batch.columns[0].fixed);
      CHECK(reader.read_column(1, 0, 3000).var == batch.columns[1].var);
    }
  }
}

TEST_CASE("bitshuffle downgrades to shuffle when counts are odd") {
  std::mt19937_64 rng(6);
  const fs::path path = temp_file("downgrade.bkio");
  Writer w(path, kTwoColumns,
           uniform_configs(2, CodecId::Zstd, 3, PrecondId::BitShuffle),
           FlushPolicy::only_at_cluster(1000));
  w.append(two_column_batch(900, rng));  // 900 % 8 != 0
  FileFooter footer = w.close();
  for (const auto& e : footer.directory)
    CHECK(e.precond_applied == PrecondId::Shuffle);

  Reader reader(path);
  CHECK(reader.footer().total_events == 900);
}

TEST_CASE("range reads agree with full read") {
  std::mt19937_64 rng(7);
  const EventBatch batch = two_column_batch(2500, rng);
  const fs::path path = temp_file("range.bkio");
  Writer w(path, kTwoColumns,
           uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
           FlushPolicy::only_at_cluster(1000));
  w.append(batch);
  w.close();

  Reader reader(path);
  CHECK(reader.read_column(0, 100, 0).fixed.empty());

  // straddles the first cluster boundary
  ColumnChunk straddle = reader.read_column(1, 900, 200);
  for (std::size_t i = 0; i < 200; ++i)
    CHECK(straddle.var[i] == batch.columns[1].var[900 + i]);

  const ColumnChunk full_fixed = reader.read_column(0, 0, 2500);
  std::uniform_int_distribution<std::uint64_t> begin_dist(0, 2499);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t begin = begin_dist(rng);
    std::uniform_int_distribution<std::uint64_t> count_dist(0, 2500 - begin);
    const std::uint64_t count = count_dist(rng);
    const ColumnChunk part = reader.read_column(0, begin, count);
    CHECK(part.fixed == Bytes(full_fixed.fixed.begin() + begin * 4,
                              full_fixed.fixed.begin() + (begin + count) * 4));
  }
}

TEST_CASE("scan_all totals match the directory") {
  std::mt19937_64 rng(8);
  const fs::path path = temp_file("scan.bkio");
  Writer w(path, kTwoColumns,
           uniform_configs(2, CodecId::Raw, 0, PrecondId::None),
           FlushPolicy::only_at_cluster(500));
  const EventBatch batch = two_column_batch(1700, rng);
  w.append(batch);
  FileFooter footer = w.close();

  std::uint64_t expected = 0;
  for (const auto& e : footer.directory)
    expected += e.uncompressed_data_len + e.uncompressed_offsets_len;

  Reader reader(path);
  const auto s1 = reader.scan_all();
  const auto s2 = reader.scan_all();
  CHECK(s1.total_bytes == expected);
  CHECK(s1.total_bytes == s2.total_bytes);
  CHECK(s1.column_bytes == s2.column_bytes);

  // raw codec: totals equal the serialized input size
  std::uint64_t serialized = batch.columns[0].fixed.size();
  serialized += batch.columns[1].var.size() * kOffsetWidth;
  for (const Bytes& ev : batch.columns[1].var) serialized += ev.size();
  CHECK(s1.total_bytes == serialized);
}

TEST_CASE("reader rejects corrupted files") {
  std::mt19937_64 rng(9);
  const fs::path path = temp_file("corrupt.bkio");
  {
    Writer w(path, kTwoColumns,
             uniform_configs(2, CodecId::Zstd, 3, PrecondId::None),
             FlushPolicy::only_at_cluster(500));
    w.append(two_column_batch(1200, rng));
    w.close();
  }
  const Bytes good = read_file(path);

  SUBCASE("truncated trailer") {
    write_file(path, Bytes(good.begin(), good.end() - 4));
    CHECK_THROWS_AS(Reader reader(path), BadMagic);
  }
  SUBCASE("bad magic") {
    Bytes bad = good;
    bad[0] = 'X';
    write_file(path, bad);
    CHECK_THROWS_AS(Reader reader(path), BadMagic);
  }
  SUBCASE("unparseable footer") {
    const std::uint64_t len = load_le<std::uint64_t>(good.data() + good.size() - 12);
    Bytes bad = good;
    bad[bad.size() - 12 - len] = '!';
    write_file(path, bad);
    CHECK_THROWS_AS(Reader reader(path), CorruptFooter);
  }
  SUBCASE("directory gap") {
    Reader reader(path);
    nlohmann::json footer = footer_to_json(reader.footer());
    footer["directory"][0]["first_event"] =
        footer["directory"][0]["first_event"].get<std::uint64_t>() + 1;
    rewrite_footer(path, footer);
    CHECK_THROWS_AS(Reader mutated(path), DirectoryGap);
  }
  SUBCASE("missing column coverage") {
    Reader reader(path);
    nlohmann::json footer = footer_to_json(reader.footer());
    auto& dir = footer["directory"];
    dir.erase(dir.size() - 1);
    rewrite_footer(path, footer);
    CHECK_THROWS_AS(Reader mutated(path), DirectoryGap);
  }
}

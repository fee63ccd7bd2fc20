#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bkio/bench.hpp"

using namespace bkio;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "bkio-bench-tests";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> parse_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("dataset generation is deterministic") {
  const Dataset a = generate_dataset(DatasetKind::FlatNtuple, 3000, 9);
  const Dataset b = generate_dataset(DatasetKind::FlatNtuple, 3000, 9);
  REQUIRE(a.batches.size() == b.batches.size());
  for (std::size_t i = 0; i < a.batches.size(); ++i)
    for (std::size_t c = 0; c < a.schema.size(); ++c) {
      CHECK(a.batches[i].columns[c].fixed == b.batches[i].columns[c].fixed);
      CHECK(a.batches[i].columns[c].var == b.batches[i].columns[c].var);
    }
  CHECK(a.serialized_bytes() == b.serialized_bytes());

  const Dataset c = generate_dataset(DatasetKind::FlatNtuple, 3000, 10);
  CHECK(a.batches[0].columns[0].fixed != c.batches[0].columns[0].fixed);
}

TEST_CASE("carray offsets are non-decreasing and start at zero") {
  const Dataset ds = generate_dataset(DatasetKind::CArray, 2000, 42);
  REQUIRE(ds.schema.size() == 1);
  CHECK(ds.schema[0].arity == Arity::Variable);
  auto [data, offsets] = serialize_variable_column(
      std::span<const Bytes>(ds.batches[0].columns[0].var), 4);
  const auto decoded = unpack_values<std::uint32_t>(offsets);
  CHECK(decoded[0] == 0);
  for (std::size_t i = 1; i < decoded.size(); ++i)
    CHECK(decoded[i] >= decoded[i - 1]);
  CHECK(decoded.back() <= data.size());
}

TEST_CASE("nanoaod-like events serialize to roughly 1 KiB") {
  const Dataset ds = generate_dataset(DatasetKind::NanoAodLike, 10000, 42);
  const double per_event =
      static_cast<double>(ds.serialized_bytes()) / ds.total_events;
  CHECK(per_event >= 700.0);
  CHECK(per_event <= 1400.0);
}

TEST_CASE("run_matrix: raw ratio accounts for frame headers") {
  MatrixSpec spec;
  spec.kind = DatasetKind::FlatNtuple;
  spec.n_events = 2000;
  spec.seed = 42;
  spec.codecs = {{CodecId::Raw, 0}, {CodecId::Zstd, 3}};
  spec.preconds = {PrecondId::None};
  spec.policies = {FlushPolicy::only_at_cluster(1000)};

  const auto rows = run_matrix(spec, workdir());
  REQUIRE(!rows.empty());
  for (const BenchReportRow& row : rows) {
    CHECK(row.error.empty());
    if (row.column != "<file>") continue;
    CHECK(row.ratio > 0.0);
    // ratio * compressed == uncompressed within rounding
    CHECK(row.ratio * row.compressed_bytes ==
          doctest::Approx(static_cast<double>(row.uncompressed_bytes)));
    if (row.codec == "raw") {
      CHECK(row.ratio < 1.0);
      const std::uint64_t frames =
          (row.compressed_bytes - row.uncompressed_bytes) / kFrameHeaderSize;
      CHECK(row.compressed_bytes ==
            row.uncompressed_bytes + frames * kFrameHeaderSize);
    }
  }
}

TEST_CASE("run_matrix records failed cells instead of aborting") {
  MatrixSpec spec;
  spec.kind = DatasetKind::FlatNtuple;
  spec.n_events = 100;
  spec.seed = 1;
  spec.codecs = {{CodecId::Zstd, 3}};
  spec.preconds = {PrecondId::None};
  // per-basket limit below the 1024 floor fails cell validation
  spec.policies = {FlushPolicy::per_basket(1), FlushPolicy::only_at_cluster(50)};
  const auto rows = run_matrix(spec, workdir());
  bool saw_error = false, saw_ok = false;
  for (const auto& row : rows) {
    if (!row.error.empty()) saw_error = true;
    if (row.error.empty() && row.column == "<file>") saw_ok = true;
  }
  CHECK(saw_error);
  CHECK(saw_ok);
}

TEST_CASE("emit_report formats") {
  BenchReportRow row;
  row.dataset = "flat";
  row.column = "<file>";
  row.codec = "zstd";
  row.level = 3;
  row.precond = "none";
  row.policy = "cluster:1000";
  row.uncompressed_bytes = 1000;
  row.compressed_bytes = 400;
  row.ratio = 2.5;
  row.write_mb_s = 123.456;
  row.read_mb_s = 789.123;

  const fs::path csv = workdir() / "report.csv";
  emit_report({row}, ReportFormat::Csv, csv);
  const auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "dataset");
  CHECK(rows[1][0] == "flat");
  CHECK(rows[1][2] == "zstd");
  CHECK(rows[1][6] == "1000");
  CHECK(rows[1][7] == "400");
  CHECK(rows[1][8] == "2.5");
  CHECK(rows[1][9] == "123.5");  // 4 significant digits

  const std::string md = format_report({row, row}, ReportFormat::Markdown);
  std::size_t lines = 0;
  for (char ch : md)
    if (ch == '\n') ++lines;
  CHECK(lines == 4);  // header + rule + 2 rows

  CHECK_THROWS_AS(format_report({}, ReportFormat::Csv), Error);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bkio/reader.hpp"
#include "bkio/writer.hpp"

namespace bkio {

enum class DatasetKind { NanoAodLike, FlatNtuple, CArray };

std::string to_string(DatasetKind kind);
DatasetKind dataset_from_string(const std::string& s);

struct Dataset {
  std::vector<ColumnSchema> schema;
  std::vector<EventBatch> batches;
  std::uint64_t total_events = 0;

  /// Serialized payload bytes: fixed data + variable data + offset arrays.
  std::uint64_t serialized_bytes() const;
};

/// Deterministic synthetic HEP-like data for a (kind, n_events, seed) triple.
Dataset generate_dataset(DatasetKind kind, std::uint64_t n_events,
                         std::uint64_t seed);

struct BenchReportRow {
  std::string dataset;
  std::string column;  // "<file>" for whole-file rows
  std::string codec;
  int level = 0;
  std::string precond;
  std::string policy;
  std::uint64_t uncompressed_bytes = 0;
  std::uint64_t compressed_bytes = 0;
  double ratio = 0.0;
  double write_mb_s = 0.0;
  double read_mb_s = 0.0;
  double write_seconds = 0.0;
  double read_seconds = 0.0;
  std::string error;
};

struct MatrixSpec {
  DatasetKind kind = DatasetKind::NanoAodLike;
  std::uint64_t n_events = 10000;
  std::uint64_t seed = 42;
  std::vector<std::pair<CodecId, int>> codecs;
  std::vector<PrecondId> preconds;
  std::vector<FlushPolicy> policies;
};

/// Runs the codec x precond x policy matrix over one synthetic dataset. Each
/// cell writes a file, records write throughput, runs scan_all three times
/// and keeps the median read throughput. Variable columns additionally get
/// separate data-blob and offsets-blob rows. Failed cells carry an error
/// marker instead of aborting the matrix.
std::vector<BenchReportRow> run_matrix(const MatrixSpec& spec,
                                       const std::filesystem::path& workdir);

enum class ReportFormat { Csv, Markdown };

void emit_report(const std::vector<BenchReportRow>& rows, ReportFormat format,
                 const std::filesystem::path& path);
std::string format_report(const std::vector<BenchReportRow>& rows,
                          ReportFormat format);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Directional reproduction checks behind `bench --check`: offset
/// incompressibility under LZ4, codec ratio ordering, the cluster-flush size
/// and throughput trade-off, the shuffle benefit for LZ4 on shared-exponent
/// floats, and the dictionary benefit on small similar records.
std::vector<CheckResult> run_checks(const std::filesystem::path& workdir);

/// Small similar text records (~1 KiB each) for dictionary experiments.
std::vector<Bytes> make_similar_records(std::size_t count, std::uint64_t seed);

}  // namespace bkio

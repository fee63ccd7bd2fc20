#include "bkio/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace bkio {

namespace {

constexpr std::uint64_t kBatchEvents = 4096;

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

std::string two_digit(std::size_t i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02zu", i);
  return buf;
}

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::NanoAodLike: return "nanoaod";
    case DatasetKind::FlatNtuple: return "flat";
    case DatasetKind::CArray: return "carray";
  }
  throw Error("unknown dataset kind");
}

DatasetKind dataset_from_string(const std::string& s) {
  if (s == "nanoaod") return DatasetKind::NanoAodLike;
  if (s == "flat") return DatasetKind::FlatNtuple;
  if (s == "carray") return DatasetKind::CArray;
  throw Error("unknown dataset: " + s);
}

std::uint64_t Dataset::serialized_bytes() const {
  std::uint64_t total = 0;
  for (const EventBatch& batch : batches) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const ColumnChunk& chunk = batch.columns[c];
      if (schema[c].arity == Arity::Fixed) {
        total += chunk.fixed.size();
      } else {
        total += chunk.var.size() * kOffsetWidth;
        for (const Bytes& ev : chunk.var) total += ev.size();
      }
    }
  }
  return total;
}

Dataset generate_dataset(DatasetKind kind, std::uint64_t n_events,
                         std::uint64_t seed) {
  if (n_events < 1)
    throw Error("n_events must be at least 1");

  Dataset ds;
  ds.total_events = n_events;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull +
                      static_cast<std::uint64_t>(kind));

  switch (kind) {
    case DatasetKind::NanoAodLike:
      for (std::size_t i = 0; i < 20; ++i)
        ds.schema.push_back({"f32_" + two_digit(i), ElementType::F32, Arity::Fixed});
      for (std::size_t i = 0; i < 10; ++i)
        ds.schema.push_back({"i32_" + two_digit(i), ElementType::I32, Arity::Fixed});
      for (std::size_t i = 0; i < 4; ++i)
        ds.schema.push_back({"jet_" + two_digit(i), ElementType::F32, Arity::Variable});
      break;
    case DatasetKind::FlatNtuple:
      for (std::size_t i = 0; i < 4; ++i)
        ds.schema.push_back({"d_" + two_digit(i), ElementType::F64, Arity::Fixed});
      for (std::size_t i = 0; i < 4; ++i)
        ds.schema.push_back({"l_" + two_digit(i), ElementType::I64, Arity::Fixed});
      break;
    case DatasetKind::CArray:
      ds.schema.push_back({"arr", ElementType::I32, Arity::Variable});
      break;
  }

  std::normal_distribution<double> narrow_normal(100.0, 10.0);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> small_uniform(0, 100);
  std::uniform_int_distribution<std::int64_t> wide_uniform(0, 1'000'000);
  std::uniform_int_distribution<std::int32_t> u16_uniform(0, 65535);
  std::poisson_distribution<int> jet_len(50);
  std::poisson_distribution<int> arr_len(20);
  std::exponential_distribution<double> expo(1.0 / 50.0);

  for (std::uint64_t done = 0; done < n_events; done += kBatchEvents) {
    const std::uint64_t count = std::min(kBatchEvents, n_events - done);
    EventBatch batch;
    batch.event_count = count;
    batch.columns.resize(ds.schema.size());

    for (std::size_t c = 0; c < ds.schema.size(); ++c) {
      const ColumnSchema& s = ds.schema[c];
      ColumnChunk& chunk = batch.columns[c];
      if (s.arity == Arity::Fixed) {
        chunk.fixed.resize(count * s.width());
        for (std::uint64_t e = 0; e < count; ++e) {
          std::uint8_t* dst = chunk.fixed.data() + e * s.width();
          switch (s.element_type) {
            case ElementType::F32:
              store_le(dst, static_cast<float>(narrow_normal(rng)));
              break;
            case ElementType::F64:
              store_le(dst, unit_normal(rng));
              break;
            case ElementType::I32:
              store_le(dst, small_uniform(rng));
              break;
            case ElementType::I64:
              store_le(dst, wide_uniform(rng));
              break;
            case ElementType::U8:
              dst[0] = static_cast<std::uint8_t>(small_uniform(rng));
              break;
          }
        }
      } else {
        chunk.var.resize(count);
        const bool is_f32 = s.element_type == ElementType::F32;
        auto& len_dist = is_f32 ? jet_len : arr_len;
        for (std::uint64_t e = 0; e < count; ++e) {
          const int len = len_dist(rng);
          Bytes& ev = chunk.var[e];
          ev.resize(static_cast<std::size_t>(len) * s.width());
          for (int k = 0; k < len; ++k) {
            std::uint8_t* dst = ev.data() + static_cast<std::size_t>(k) * s.width();
            if (is_f32)
              store_le(dst, static_cast<float>(expo(rng)));
            else
              store_le(dst, u16_uniform(rng));
          }
        }
      }
    }
    ds.batches.push_back(std::move(batch));
  }
  return ds;
}

namespace {

struct WrittenFile {
  FileFooter footer;
  double write_seconds = 0.0;
  std::uint64_t file_size = 0;
};

WrittenFile write_dataset(const std::filesystem::path& path, const Dataset& ds,
                          CodecId codec, int level, PrecondId precond,
                          FlushPolicy policy) {
  std::vector<ColumnCodecConfig> configs(
      ds.schema.size(), ColumnCodecConfig{{codec, level, nullptr}, precond});
  const auto t0 = std::chrono::steady_clock::now();
  Writer writer(path, ds.schema, configs, policy);
  for (const EventBatch& batch : ds.batches) writer.append(batch);
  WrittenFile out;
  out.footer = writer.close();
  const auto t1 = std::chrono::steady_clock::now();
  out.write_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.file_size = std::filesystem::file_size(path);
  return out;
}

struct FooterTotals {
  std::uint64_t uncompressed = 0;
  std::uint64_t compressed = 0;
};

FooterTotals footer_totals(const FileFooter& footer) {
  FooterTotals t;
  for (const BasketDirectoryEntry& e : footer.directory) {
    t.uncompressed += e.uncompressed_data_len + e.uncompressed_offsets_len;
    t.compressed += e.framed_data_len + e.framed_offsets_len;
  }
  return t;
}

double median_scan_seconds(const Reader& reader) {
  double a = reader.scan_all().seconds;
  double b = reader.scan_all().seconds;
  double c = reader.scan_all().seconds;
  return median3(a, b, c);
}

// One timed scan that is valid for throughput comparison: if the scanning
// thread was preempted mid-scan (wall time well above thread CPU time, a
// real hazard on a single-core box), the sample measures the scheduler, not
// the decode path, so it is discarded and the scan retried after a pause.
// `valid` reports whether a clean sample was obtained before the attempt cap.
double valid_scan_seconds(const Reader& reader, bool* valid) {
  double best = 0.0, best_ratio = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 12; ++attempt) {
    timespec c0{}, c1{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &c0);
    const auto w0 = std::chrono::steady_clock::now();
    const double decode_seconds = reader.scan_all().seconds;
    const auto w1 = std::chrono::steady_clock::now();
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &c1);
    const double wall = std::chrono::duration<double>(w1 - w0).count();
    const double cpu = static_cast<double>(c1.tv_sec - c0.tv_sec) +
                       static_cast<double>(c1.tv_nsec - c0.tv_nsec) * 1e-9;
    const double ratio = wall / std::max(cpu, 1e-9);
    if (ratio <= 1.05) {
      if (valid) *valid = true;
      return decode_seconds;
    }
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = decode_seconds;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  if (valid) *valid = false;
  return best;  // heavily contended host: least-perturbed sample
}

}  // namespace

std::vector<BenchReportRow> run_matrix(const MatrixSpec& spec,
                                       const std::filesystem::path& workdir) {
  if (spec.codecs.empty() || spec.preconds.empty() || spec.policies.empty())
    throw Error("matrix must not be empty");
  std::filesystem::create_directories(workdir);

  Dataset ds = generate_dataset(spec.kind, spec.n_events, spec.seed);
  std::vector<BenchReportRow> rows;

  for (const auto& [codec, level] : spec.codecs) {
    for (PrecondId precond : spec.preconds) {
      for (const FlushPolicy& policy : spec.policies) {
        BenchReportRow row;
        row.dataset = to_string(spec.kind);
        row.column = "<file>";
        row.codec = to_string(codec);
        row.level = level;
        row.precond = to_string(precond);
        row.policy = policy.describe();
        const std::filesystem::path path =
            workdir / ("bench_" + row.dataset + "_" + row.codec + "_" +
                       std::to_string(level) + "_" + row.precond + "_" +
                       row.policy + ".bkio");
        try {
          WrittenFile wf = write_dataset(path, ds, codec, level, precond, policy);
          FooterTotals totals = footer_totals(wf.footer);
          row.uncompressed_bytes = totals.uncompressed;
          row.compressed_bytes = totals.compressed;
          row.ratio = static_cast<double>(totals.uncompressed) /
                      static_cast<double>(totals.compressed);
          row.write_seconds = wf.write_seconds;
          row.write_mb_s = totals.uncompressed / 1e6 / wf.write_seconds;

          Reader reader(path);
          row.read_seconds = median_scan_seconds(reader);
          row.read_mb_s = totals.uncompressed / 1e6 / row.read_seconds;
          rows.push_back(row);

          // Per-blob decomposition: separate data/offsets rows for
          // variable columns.
          for (std::size_t c = 0; c < ds.schema.size(); ++c) {
            if (ds.schema[c].arity != Arity::Variable) continue;
            BenchReportRow data_row = row;
            BenchReportRow off_row = row;
            data_row.column = ds.schema[c].name + "/data";
            off_row.column = ds.schema[c].name + "/offsets";
            data_row.uncompressed_bytes = data_row.compressed_bytes = 0;
            off_row.uncompressed_bytes = off_row.compressed_bytes = 0;
            for (const BasketDirectoryEntry& e : wf.footer.directory) {
              if (e.column_index != c) continue;
              data_row.uncompressed_bytes += e.uncompressed_data_len;
              data_row.compressed_bytes += e.framed_data_len;
              off_row.uncompressed_bytes += e.uncompressed_offsets_len;
              off_row.compressed_bytes += e.framed_offsets_len;
            }
            for (BenchReportRow* r : {&data_row, &off_row}) {
              r->ratio = static_cast<double>(r->uncompressed_bytes) /
                         static_cast<double>(r->compressed_bytes);
              r->write_mb_s = r->read_mb_s = 0.0;
              r->write_seconds = r->read_seconds = 0.0;
              rows.push_back(*r);
            }
          }
        } catch (const std::exception& e) {
          row.error = e.what();
          rows.push_back(row);
        }
        std::error_code ec;
        std::filesystem::remove(path, ec);
      }
    }
  }
  return rows;
}

std::string format_report(const std::vector<BenchReportRow>& rows,
                          ReportFormat format) {
  if (rows.empty())
    throw Error("no rows to report");
  static const char* kFields[] = {
      "dataset", "column", "codec", "level", "precond", "policy",
      "uncompressed_bytes", "compressed_bytes", "ratio", "write_mb_s",
      "read_mb_s", "write_seconds", "read_seconds", "error"};

  std::ostringstream out;
  auto cells = [](const BenchReportRow& r) {
    return std::vector<std::string>{
        r.dataset, r.column, r.codec, std::to_string(r.level), r.precond,
        r.policy, std::to_string(r.uncompressed_bytes),
        std::to_string(r.compressed_bytes), fmt4(r.ratio), fmt4(r.write_mb_s),
        fmt4(r.read_mb_s), fmt4(r.write_seconds), fmt4(r.read_seconds),
        r.error};
  };

  const std::size_t n = std::size(kFields);
  if (format == ReportFormat::Csv) {
    for (std::size_t i = 0; i < n; ++i)
      out << kFields[i] << (i + 1 < n ? "," : "\n");
    for (const BenchReportRow& r : rows) {
      const auto c = cells(r);
      for (std::size_t i = 0; i < n; ++i)
        out << c[i] << (i + 1 < n ? "," : "\n");
    }
  } else {
    out << "|";
    for (std::size_t i = 0; i < n; ++i) out << " " << kFields[i] << " |";
    out << "\n|";
    for (std::size_t i = 0; i < n; ++i) out << " --- |";
    out << "\n";
    for (const BenchReportRow& r : rows) {
      const auto c = cells(r);
      out << "|";
      for (std::size_t i = 0; i < n; ++i) out << " " << c[i] << " |";
      out << "\n";
    }
  }
  return out.str();
}

void emit_report(const std::vector<BenchReportRow>& rows, ReportFormat format,
                 const std::filesystem::path& path) {
  const std::string text = format_report(rows, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open report file: " + path.string());
  out << text;
  if (!out)
    throw IoError("failed to write report: " + path.string());
}

std::vector<Bytes> make_similar_records(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> val(0, 999999);
  std::uniform_real_distribution<double> real(0.0, 500.0);
  std::vector<Bytes> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::ostringstream rec;
    rec << "{\n  \"run_number\": " << 300000 + val(rng) % 1000
        << ",\n  \"luminosity_block\": " << val(rng) % 2000
        << ",\n  \"event_number\": " << val(rng) << ",\n  \"trigger_bits\": [";
    for (int t = 0; t < 8; ++t) rec << (t ? "," : "") << val(rng) % 2;
    rec << "],\n  \"primary_vertices\": " << val(rng) % 60 << ",\n";
    for (int p = 0; p < 12; ++p) {
      rec << "  \"particle_" << two_digit(static_cast<std::size_t>(p))
          << "\": {\"pt\": " << fmt4(real(rng)) << ", \"eta\": "
          << fmt4(real(rng) / 100.0 - 2.5) << ", \"phi\": "
          << fmt4(real(rng) / 80.0 - 3.14) << ", \"mass\": " << fmt4(real(rng))
          << ", \"charge\": " << (val(rng) % 2 ? 1 : -1) << "},\n";
    }
    rec << "  \"met\": " << fmt4(real(rng)) << ",\n  \"met_phi\": "
        << fmt4(real(rng) / 80.0 - 3.14) << "\n}\n";
    const std::string s = rec.str();
    records.emplace_back(s.begin(), s.end());
  }
  return records;
}

namespace {

CheckResult check_offset_incompressibility(const std::filesystem::path& dir) {
  CheckResult r{"offset-incompressibility", false, ""};
  Dataset ds = generate_dataset(DatasetKind::CArray, 100000, 42);
  auto offsets_ratio = [&](CodecId codec, int level) {
    const auto path = dir / ("check3_" + to_string(codec) + ".bkio");
    WrittenFile wf = write_dataset(path, ds, codec, level, PrecondId::None,
                                   FlushPolicy::only_at_cluster(1000));
    std::uint64_t unc = 0, comp = 0;
    for (const BasketDirectoryEntry& e : wf.footer.directory) {
      unc += e.uncompressed_offsets_len;
      comp += e.framed_offsets_len;
    }
    std::filesystem::remove(path);
    return static_cast<double>(unc) / static_cast<double>(comp);
  };
  const double lz4 = offsets_ratio(CodecId::Lz4, 1);
  const double zstd = offsets_ratio(CodecId::Zstd, 3);
  r.pass = zstd > lz4 && lz4 < 1.05;
  r.detail = "offsets ratio lz4=" + fmt4(lz4) + " zstd=" + fmt4(zstd) +
             " (need zstd > lz4 and lz4 < 1.05)";
  return r;
}

CheckResult check_ratio_ordering(const std::filesystem::path& dir) {
  CheckResult r{"ratio-ordering", false, ""};
  Dataset ds = generate_dataset(DatasetKind::NanoAodLike, 100000, 42);
  struct Cell {
    double ratio;
    double read_mb_s;
  };
  auto run = [&](CodecId codec, int level) {
    const auto path = dir / ("check4_" + to_string(codec) + ".bkio");
    WrittenFile wf = write_dataset(path, ds, codec, level, PrecondId::None,
                                   FlushPolicy::only_at_cluster(1000));
    FooterTotals t = footer_totals(wf.footer);
    Reader reader(path);
    const double secs = median_scan_seconds(reader);
    std::filesystem::remove(path);
    return Cell{static_cast<double>(t.uncompressed) / t.compressed,
                t.uncompressed / 1e6 / secs};
  };
  const Cell lzma = run(CodecId::Lzma, 6);
  const Cell zstd = run(CodecId::Zstd, 3);
  const Cell lz4 = run(CodecId::Lz4, 1);
  const Cell raw = run(CodecId::Raw, 0);
  r.pass = lzma.ratio >= zstd.ratio && zstd.ratio >= lz4.ratio &&
           lz4.ratio >= raw.ratio && lz4.read_mb_s > lzma.read_mb_s;
  r.detail = "ratio lzma=" + fmt4(lzma.ratio) + " zstd=" + fmt4(zstd.ratio) +
             " lz4=" + fmt4(lz4.ratio) + " raw=" + fmt4(raw.ratio) +
             "; read MB/s lz4=" + fmt4(lz4.read_mb_s) +
             " lzma=" + fmt4(lzma.read_mb_s);
  return r;
}

CheckResult check_cluster_tradeoff(const std::filesystem::path& dir) {
  CheckResult r{"cluster-flush-tradeoff", false, ""};
  Dataset ds = generate_dataset(DatasetKind::NanoAodLike, 100000, 42);
  const auto cluster_path = dir / "check5_cluster.bkio";
  const auto basket_path = dir / "check5_basket.bkio";
  WrittenFile cluster_wf =
      write_dataset(cluster_path, ds, CodecId::Zstd, 3, PrecondId::None,
                    FlushPolicy::only_at_cluster(1000));
  WrittenFile basket_wf =
      write_dataset(basket_path, ds, CodecId::Zstd, 3, PrecondId::None,
                    FlushPolicy::per_basket(32 * 1024));
  const std::uint64_t cluster_size = cluster_wf.file_size;
  const std::uint64_t basket_size = basket_wf.file_size;
  double cluster_mb_s = 0.0, basket_mb_s = 0.0;
  {
    // The throughput comparison is directional, so both files are scanned in
    // alternation within the same time window; measuring one file's three
    // scans and then the other's lets load drift bias one side.
    Reader cluster_reader(cluster_path);
    Reader basket_reader(basket_path);
    cluster_reader.scan_all();  // untimed warm-up
    basket_reader.scan_all();
    const double unc =
        static_cast<double>(footer_totals(cluster_wf.footer).uncompressed);
    // A measurement round is trusted only if every sample was validated;
    // rounds with fallback samples are re-measured (win or lose alike).
    for (int round = 0; round < 3; ++round) {
      std::array<double, 3> cluster_s{}, basket_s{};
      bool all_valid = true;
      for (int i = 0; i < 3; ++i) {
        bool v = false;
        cluster_s[i] = valid_scan_seconds(cluster_reader, &v);
        all_valid = all_valid && v;
        basket_s[i] = valid_scan_seconds(basket_reader, &v);
        all_valid = all_valid && v;
      }
      cluster_mb_s =
          unc / 1e6 / median3(cluster_s[0], cluster_s[1], cluster_s[2]);
      basket_mb_s = unc / 1e6 / median3(basket_s[0], basket_s[1], basket_s[2]);
      if (all_valid) break;
    }
  }
  std::filesystem::remove(cluster_path);
  std::filesystem::remove(basket_path);
  const double overhead =
      static_cast<double>(cluster_size) / static_cast<double>(basket_size) - 1.0;
  r.pass = overhead <= 0.10 && cluster_mb_s >= basket_mb_s;
  r.detail = "size overhead=" + fmt4(overhead * 100.0) +
             "% (limit 10%); scan MB/s cluster=" + fmt4(cluster_mb_s) +
             " basket=" + fmt4(basket_mb_s);
  return r;
}

CheckResult check_shuffle_benefit(const std::filesystem::path& dir) {
  CheckResult r{"shuffle-benefit", false, ""};
  // One variable f32 column whose values share exponent bytes.
  Dataset ds;
  ds.schema.push_back({"narrow", ElementType::F32, Arity::Variable});
  ds.total_events = 20000;
  std::mt19937_64 rng(42);
  std::poisson_distribution<int> len_dist(5);
  std::normal_distribution<double> values(100.0, 5.0);
  for (std::uint64_t done = 0; done < ds.total_events; done += kBatchEvents) {
    const std::uint64_t count = std::min(kBatchEvents, ds.total_events - done);
    EventBatch batch;
    batch.event_count = count;
    batch.columns.resize(1);
    batch.columns[0].var.resize(count);
    for (std::uint64_t e = 0; e < count; ++e) {
      const int len = len_dist(rng);
      Bytes& ev = batch.columns[0].var[e];
      ev.resize(static_cast<std::size_t>(len) * 4);
      for (int k = 0; k < len; ++k)
        store_le(ev.data() + 4 * k, static_cast<float>(values(rng)));
    }
    ds.batches.push_back(std::move(batch));
  }

  auto compressed = [&](PrecondId precond) {
    const auto path = dir / ("check6_" + to_string(precond) + ".bkio");
    WrittenFile wf = write_dataset(path, ds, CodecId::Lz4, 1, precond,
                                   FlushPolicy::only_at_cluster(1000));
    std::filesystem::remove(path);
    return footer_totals(wf.footer).compressed;
  };
  const std::uint64_t plain = compressed(PrecondId::None);
  const std::uint64_t shuffled = compressed(PrecondId::Shuffle);
  const double gain = 1.0 - static_cast<double>(shuffled) / plain;
  r.pass = gain >= 0.05;
  r.detail = "lz4 bytes none=" + std::to_string(plain) +
             " shuffle=" + std::to_string(shuffled) + " gain=" +
             fmt4(gain * 100.0) + "% (need >= 5%)";
  return r;
}

CheckResult check_dictionary_benefit(const std::filesystem::path&) {
  CheckResult r{"dictionary-benefit", false, ""};
  std::vector<Bytes> records = make_similar_records(128, 42);
  Dictionary dict = train_dictionary(records, 16 * 1024);
  auto shared = std::make_shared<Dictionary>(dict);

  CompressionSettings plain{CodecId::Zstd, 3, nullptr};
  CompressionSettings with_dict{CodecId::Zstd, 3, shared};
  std::uint64_t total_plain = 0, total_dict = 0;
  for (const Bytes& rec : records) {
    total_plain += compress_buffer(rec, plain).size();
    total_dict += compress_buffer(rec, with_dict).size();
  }
  const double gain = 1.0 - static_cast<double>(total_dict) / total_plain;
  r.pass = gain >= 0.20;
  r.detail = "zstd bytes plain=" + std::to_string(total_plain) +
             " dict=" + std::to_string(total_dict) + " gain=" +
             fmt4(gain * 100.0) + "% (need >= 20%)";
  return r;
}

}  // namespace

std::vector<CheckResult> run_checks(const std::filesystem::path& workdir) {
  std::filesystem::create_directories(workdir);
  return {
      check_offset_incompressibility(workdir),
      check_ratio_ordering(workdir),
      check_cluster_tradeoff(workdir),
      check_shuffle_benefit(workdir),
      check_dictionary_benefit(workdir),
  };
}

}  // namespace bkio

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bkio/bench.hpp"
#include "bkio/reader.hpp"
#include "bkio/writer.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::pair<bkio::CodecId, int> parse_codec_spec(const std::string& s) {
  const auto parts = split(s, ':');
  const bkio::CodecId codec = bkio::codec_from_string(parts.at(0));
  const int level =
      parts.size() > 1 ? std::stoi(parts[1]) : bkio::default_level(codec);
  return {codec, level};
}

bkio::FlushPolicy parse_policy(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2)
    throw bkio::Error("policy must look like cluster:1000 or basket:32768");
  const std::uint64_t param = std::stoull(parts[1]);
  if (parts[0] == "cluster") return bkio::FlushPolicy::only_at_cluster(param);
  if (parts[0] == "basket") return bkio::FlushPolicy::per_basket(param);
  throw bkio::Error("unknown policy kind: " + parts[0]);
}

int cmd_bench(const std::string& dataset, std::uint64_t events,
              std::uint64_t seed, const std::string& codecs,
              const std::string& preconds, const std::string& policies,
              const std::string& out, const std::string& format, bool check,
              const std::string& workdir) {
  const fs::path work = workdir.empty()
                            ? fs::temp_directory_path() / "bkio-bench"
                            : fs::path(workdir);
  fs::create_directories(work);

  bool all_pass = true;
  if (check) {
    for (const bkio::CheckResult& r : bkio::run_checks(work)) {
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": "
                << r.detail << "\n";
      all_pass = all_pass && r.pass;
    }
  }

  if (!out.empty()) {
    bkio::MatrixSpec spec;
    spec.kind = bkio::dataset_from_string(dataset);
    spec.n_events = events;
    spec.seed = seed;
    for (const std::string& c : split(codecs, ','))
      spec.codecs.push_back(parse_codec_spec(c));
    for (const std::string& p : split(preconds, ','))
      spec.preconds.push_back(bkio::precond_from_string(p));
    for (const std::string& p : split(policies, ','))
      spec.policies.push_back(parse_policy(p));

    const auto rows = bkio::run_matrix(spec, work);
    bkio::emit_report(rows,
                      format == "md" ? bkio::ReportFormat::Markdown
                                     : bkio::ReportFormat::Csv,
                      out);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  }
  return all_pass ? 0 : 1;
}

int cmd_write(const std::string& dataset, std::uint64_t events,
              std::uint64_t seed, const std::string& out,
              const std::string& codec, const std::string& precond,
              const std::string& policy) {
  bkio::Dataset ds =
      bkio::generate_dataset(bkio::dataset_from_string(dataset), events, seed);
  const auto [codec_id, level] = parse_codec_spec(codec);
  std::vector<bkio::ColumnCodecConfig> configs(
      ds.schema.size(),
      bkio::ColumnCodecConfig{{codec_id, level, nullptr},
                              bkio::precond_from_string(precond)});
  bkio::Writer writer(out, ds.schema, configs, parse_policy(policy));
  for (const bkio::EventBatch& batch : ds.batches) writer.append(batch);
  const bkio::FileFooter footer = writer.close();
  std::cout << "wrote " << footer.total_events << " events, "
            << footer.directory.size() << " baskets, "
            << fs::file_size(out) << " bytes to " << out << "\n";
  return 0;
}

int cmd_read(const std::string& file, const std::string& column,
             std::uint64_t begin, std::int64_t count) {
  bkio::Reader reader(file);
  if (column.empty()) {
    const bkio::Reader::ScanStats stats = reader.scan_all();
    for (std::size_t c = 0; c < reader.schema().size(); ++c)
      std::cout << reader.schema()[c].name << ": " << stats.column_bytes[c]
                << " bytes\n";
    std::cout << "total: " << stats.total_bytes << " bytes, decode time "
              << stats.seconds << " s ("
              << stats.total_bytes / 1e6 / stats.seconds << " MB/s)\n";
    return 0;
  }
  const std::size_t c = reader.column_index(column);
  const std::uint64_t n =
      count < 0 ? reader.footer().total_events - begin
                : static_cast<std::uint64_t>(count);
  const bkio::ColumnChunk chunk = reader.read_column(c, begin, n);
  std::uint64_t bytes = chunk.fixed.size();
  for (const bkio::Bytes& ev : chunk.var) bytes += ev.size();
  std::cout << column << "[" << begin << ".." << begin + n << "): " << bytes
            << " data bytes\n";
  return 0;
}

int cmd_inspect(const std::string& file) {
  bkio::Reader reader(file);
  std::cout << bkio::footer_to_json(reader.footer()).dump(2) << "\n";
  return 0;
}

int cmd_train_dict(const std::string& samples_dir, std::size_t capacity,
                   const std::string& out) {
  std::vector<bkio::Bytes> samples;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(samples_dir))
    if (entry.is_regular_file()) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const fs::path& p : paths) {
    std::ifstream in(p, std::ios::binary);
    bkio::Bytes buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    samples.push_back(std::move(buf));
  }
  std::string warning;
  const bkio::Dictionary dict =
      bkio::train_dictionary(samples, capacity, &warning);
  if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(dict.blob.data()),
           static_cast<std::streamsize>(dict.blob.size()));
  if (!os) throw bkio::IoError("cannot write dictionary: " + out);
  std::cout << "trained dictionary from " << samples.size() << " samples: "
            << dict.blob.size() << " bytes -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"columnar event storage and compression benchmark"};
  app.require_subcommand(1);

  // bench
  std::string dataset = "nanoaod", codecs = "zstd:3,lz4:1,zlib:6,lzma:6";
  std::string preconds = "none", policies = "cluster:1000";
  std::string out, format = "csv", workdir;
  std::uint64_t events = 10000, seed = 42;
  bool check = false;
  auto* bench = app.add_subcommand("bench", "run the measurement matrix");
  bench->add_option("--dataset", dataset)->check(CLI::IsMember({"nanoaod", "flat", "carray"}));
  bench->add_option("--events", events);
  bench->add_option("--seed", seed);
  bench->add_option("--codecs", codecs, "comma list of codec:level");
  bench->add_option("--precond", preconds, "comma list of none,shuffle,bitshuffle,bss");
  bench->add_option("--policy", policies, "comma list of cluster:N,basket:S");
  bench->add_option("--out", out, "report path");
  bench->add_option("--format", format)->check(CLI::IsMember({"csv", "md"}));
  bench->add_option("--workdir", workdir);
  bench->add_flag("--check", check, "run directional reproduction checks");

  // write
  std::string wfile, wcodec = "zstd:3", wprecond = "none", wpolicy = "cluster:1000";
  auto* write = app.add_subcommand("write", "write a synthetic container file");
  write->add_option("--dataset", dataset)->check(CLI::IsMember({"nanoaod", "flat", "carray"}));
  write->add_option("--events", events);
  write->add_option("--seed", seed);
  write->add_option("--out", wfile)->required();
  write->add_option("--codec", wcodec);
  write->add_option("--precond", wprecond);
  write->add_option("--policy", wpolicy);

  // read
  std::string rfile, rcolumn;
  std::uint64_t rbegin = 0;
  std::int64_t rcount = -1;
  auto* read = app.add_subcommand("read", "scan a container file");
  read->add_option("file", rfile)->required();
  read->add_option("--column", rcolumn);
  read->add_option("--begin", rbegin);
  read->add_option("--count", rcount);

  // inspect
  std::string ifile;
  auto* inspect = app.add_subcommand("inspect", "dump the footer as JSON");
  inspect->add_option("file", ifile)->required();

  // train-dict
  std::string samples_dir, dict_out;
  std::size_t capacity = 16 * 1024;
  auto* train = app.add_subcommand("train-dict", "train a zstd dictionary");
  train->add_option("--samples", samples_dir)->required();
  train->add_option("--capacity", capacity);
  train->add_option("--out", dict_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed())
      return cmd_bench(dataset, events, seed, codecs, preconds, policies, out,
                       format, check, workdir);
    if (write->parsed())
      return cmd_write(dataset, events, seed, wfile, wcodec, wprecond, wpolicy);
    if (read->parsed()) return cmd_read(rfile, rcolumn, rbegin, rcount);
    if (inspect->parsed()) return cmd_inspect(ifile);
    if (train->parsed()) return cmd_train_dict(samples_dir, capacity, dict_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

// Acceptance suite: runs each criterion end to end and prints one
// pass/fail line per criterion. Exit code is the number of failures.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "bkio/bench.hpp"
#include "bkio/reader.hpp"
#include "bkio/writer.hpp"

using namespace bkio;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "bkio-acceptance";
  fs::create_directories(dir);
  return dir;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> byte(0, 255);
  Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

// ---- criterion 1: full round-trip matrix ----------------------------------

void criterion_1() {
  const Dataset ds = generate_dataset(DatasetKind::NanoAodLike, 10000, 1);
  const std::vector<std::pair<CodecId, int>> codecs = {
      {CodecId::Raw, 0},  {CodecId::Deflate, 6}, {CodecId::Lz4, 1},
      {CodecId::Lzma, 6}, {CodecId::Zstd, 3}};
  const std::vector<PrecondId> preconds = {
      PrecondId::None, PrecondId::Shuffle, PrecondId::BitShuffle,
      PrecondId::ByteStreamSplit};
  const std::vector<FlushPolicy> policies = {
      FlushPolicy::per_basket(32 * 1024), FlushPolicy::only_at_cluster(1000)};

  std::size_t cells = 0, identical = 0;
  std::string first_failure;
  for (const auto& [codec, level] : codecs) {
    for (PrecondId precond : preconds) {
      for (const FlushPolicy& policy : policies) {
        ++cells;
        const fs::path path = workdir() / "roundtrip.bkio";
        std::vector<ColumnCodecConfig> configs(
            ds.schema.size(),
            ColumnCodecConfig{{codec, level, nullptr}, precond});
        Writer writer(path, ds.schema, configs, policy);
        for (const EventBatch& batch : ds.batches) writer.append(batch);
        writer.close();

        Reader reader(path);
        bool ok = true;
        for (std::size_t c = 0; c < ds.schema.size() && ok; ++c) {
          const ColumnChunk got = reader.read_column(c, 0, ds.total_events);
          std::uint64_t pos = 0;
          for (const EventBatch& batch : ds.batches) {
            const ColumnChunk& want = batch.columns[c];
            if (ds.schema[c].arity == Arity::Fixed) {
              const std::size_t w = ds.schema[c].width();
              if (!std::equal(want.fixed.begin(), want.fixed.end(),
                              got.fixed.begin() + pos * w)) {
                ok = false;
                break;
              }
            } else {
              for (std::size_t e = 0; e < batch.event_count; ++e)
                if (got.var[pos + e] != want.var[e]) {
                  ok = false;
                  break;
                }
            }
            pos += batch.event_count;
          }
        }
        if (ok) {
          ++identical;
        } else if (first_failure.empty()) {
          first_failure = to_string(codec) + "/" + to_string(precond) + "/" +
                          policy.describe();
        }
        fs::remove(path);
      }
    }
  }
  report(1, "round-trip suite", identical == cells,
         std::to_string(identical) + "/" + std::to_string(cells) +
             " cells identical" +
             (first_failure.empty() ? "" : "; first failure " + first_failure));
}

// ---- criterion 2: pre-conditioner oracles ----------------------------------

Bytes shuffle_oracle(const Bytes& in, std::size_t e) {
  const std::size_t n = in.size() / e;
  Bytes out(in.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < e; ++j)
      out[j * n + i] = in[i * e + j];
  return out;
}

Bytes bitshuffle_oracle(const Bytes& in, std::size_t e) {
  const std::size_t n = in.size() / e;
  Bytes out(in.size(), 0);
  for (std::size_t b = 0; b < 8 * e; ++b)
    for (std::size_t el = 0; el < n; ++el)
      if ((in[el * e + b / 8] >> (b % 8)) & 1u)
        out[b * (n / 8) + el / 8] |= 1u << (el % 8);
  return out;
}

void criterion_2() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> stride(1, 16);
  std::uniform_int_distribution<std::size_t> groups(1, 32);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t e = stride(rng);
    const Bytes buf = random_bytes(rng, e * 8 * groups(rng));
    if (shuffle(buf, e) != shuffle_oracle(buf, e)) ++mismatches;
    if (bitshuffle(buf, e) != bitshuffle_oracle(buf, e)) ++mismatches;
    if (byte_stream_split(buf, e) != shuffle(buf, e)) ++mismatches;
  }
  report(2, "pre-conditioner oracles", mismatches == 0,
         "1000 random buffers x 3 transforms, " + std::to_string(mismatches) +
             " mismatches");
}

// ---- criteria 3-7 are the directional checks behind `bench --check` --------

void criteria_3_to_7() {
  const std::vector<CheckResult> results = run_checks(workdir());
  const int numbers[] = {3, 4, 5, 6, 7};
  for (std::size_t i = 0; i < results.size(); ++i)
    report(numbers[i], results[i].name, results[i].pass, results[i].detail);
}

// ---- criterion 8: frame format bit-exactness --------------------------------

void criterion_8() {
  bool pass = true;
  std::string detail = "ok";
  try {
    // c_size/u_size of 300 encode as 2C 01 00
    std::mt19937_64 rng(8);
    const Bytes payload = random_bytes(rng, 300);
    const Bytes frame = compress_frame(payload, {CodecId::Raw, 0, nullptr});
    const Bytes header(frame.begin(), frame.begin() + 9);
    const Bytes expect = {'R', 'W', 0, 0x2C, 0x01, 0x00, 0x2C, 0x01, 0x00};
    if (header != expect) {
      pass = false;
      detail = "300-byte raw header mismatch";
    }

    // hand-constructed frame parses exactly
    const Bytes hand = {'R', 'W', 0, 3, 0, 0, 3, 0, 0, 'a', 'b', 'c'};
    const FrameResult r = decompress_frame(hand);
    if (r.payload != Bytes{'a', 'b', 'c'} || r.consumed != 12) {
      pass = false;
      detail = "hand-constructed raw frame mismatch";
    }

    // split boundaries at the 3-byte size limit
    const Bytes exact(kMaxFramePayload, 0x7E);
    const Bytes one = compress_buffer(exact, {CodecId::Raw, 0, nullptr});
    if (one.size() != kFrameHeaderSize + kMaxFramePayload) {
      pass = false;
      detail = "16777215-byte payload did not emit exactly one frame";
    }
    const Bytes plus(kMaxFramePayload + 1, 0x7E);
    const Bytes two = compress_buffer(plus, {CodecId::Raw, 0, nullptr});
    const std::size_t second = kFrameHeaderSize + kMaxFramePayload;
    if (two.size() != 2 * kFrameHeaderSize + kMaxFramePayload + 1 ||
        two[second + 6] != 1 || two[second + 7] != 0 || two[second + 8] != 0) {
      pass = false;
      detail = "16777216-byte payload did not split into 1 + 1-byte frames";
    }
    if (decompress_buffer(two, plus.size()) != plus) {
      pass = false;
      detail = "split payload did not round-trip";
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  report(8, "frame format bit-exactness", pass, detail);
}

// ---- criterion 9: bench --check end to end ----------------------------------

void criterion_9(const std::string& cli) {
  if (cli.empty()) {
    report(9, "bench --check", false, "no CLI path supplied");
    return;
  }
  const fs::path work = workdir() / "cli-check";
  const std::string cmd = cli + " bench --check --workdir " + work.string();
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(9, "bench --check", rc == 0 && secs < 900.0,
         "exit=" + std::to_string(rc) + " wall=" + std::to_string(secs) + "s" +
             " (limit 900s)");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion_1();
  criterion_2();
  criteria_3_to_7();
  criterion_8();
  criterion_9(cli);
  std::printf("%s: %d criterion(s) failed\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures);
  return g_failures;
}

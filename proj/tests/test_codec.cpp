#include <doctest.h>

#include <random>

#include "bkio/bench.hpp"
#include "bkio/codec.hpp"

using namespace bkio;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> byte(0, 255);
  Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

Bytes text_like(std::mt19937_64& rng, std::size_t len) {
  static const std::string words =
      "event momentum detector trigger particle energy cluster basket ";
  Bytes out;
  std::uniform_int_distribution<std::size_t> start(0, words.size() - 8);
  while (out.size() < len) {
    const std::size_t s = start(rng);
    out.insert(out.end(), words.begin() + s, words.begin() + s + 8);
  }
  out.resize(len);
  return out;
}

const std::vector<std::pair<CodecId, int>> kMatrix = {
    {CodecId::Raw, 0},  {CodecId::Deflate, 6}, {CodecId::Lzma, 6},
    {CodecId::Lz4, 1},  {CodecId::Zstd, 3},
};

std::size_t count_frames(const Bytes& framed) {
  std::size_t count = 0, pos = 0;
  while (pos < framed.size()) {
    const std::size_t c_size = framed[pos + 3] |
                               (std::size_t(framed[pos + 4]) << 8) |
                               (std::size_t(framed[pos + 5]) << 16);
    pos += kFrameHeaderSize + c_size;
    ++count;
  }
  REQUIRE(pos == framed.size());
  return count;
}

}  // namespace

TEST_CASE("compress_frame rejects bad inputs") {
  CompressionSettings zstd{CodecId::Zstd, 3, nullptr};
  CHECK_THROWS_AS(compress_frame({}, zstd), EmptyPayload);
  CHECK_THROWS_AS(compress_frame(Bytes(kMaxFramePayload + 1, 0), zstd),
                  PayloadTooLarge);
  CHECK_THROWS_AS(compress_frame(Bytes(8, 0), {CodecId::Zstd, 99, nullptr}),
                  InvalidSettings);
  auto dict = std::make_shared<Dictionary>();
  CHECK_THROWS_AS(compress_frame(Bytes(8, 0), {CodecId::Lz4, 1, dict}),
                  InvalidSettings);
}

TEST_CASE("frame header fields reflect actual sizes") {
  const Bytes zeros(100, 0);
  const Bytes frame = compress_frame(zeros, {CodecId::Zstd, 3, nullptr});
  CHECK(frame[0] == 'Z');
  CHECK(frame[1] == 'S');
  CHECK(frame[2] == 3);
  const std::size_t c_size = frame[3] | (frame[4] << 8) | (frame[5] << 16);
  const std::size_t u_size = frame[6] | (frame[7] << 8) | (frame[8] << 16);
  CHECK(u_size == 100);
  CHECK(frame.size() == kFrameHeaderSize + c_size);

  const FrameResult r = decompress_frame(frame);
  CHECK(r.payload == zeros);
  CHECK(r.consumed == frame.size());
}

TEST_CASE("c_size of 300 encodes as 2C 01 00") {
  std::mt19937_64 rng(5);
  const Bytes payload = random_bytes(rng, 300);  // random stays raw
  const Bytes frame = compress_frame(payload, {CodecId::Raw, 0, nullptr});
  CHECK(frame[0] == 'R');
  CHECK(frame[1] == 'W');
  CHECK(frame[2] == 0);
  CHECK(frame[3] == 0x2C);
  CHECK(frame[4] == 0x01);
  CHECK(frame[5] == 0x00);
  CHECK(frame[6] == 0x2C);
  CHECK(frame[7] == 0x01);
  CHECK(frame[8] == 0x00);
}

TEST_CASE("raw frame of abc") {
  const Bytes abc = {'a', 'b', 'c'};
  const Bytes frame = compress_frame(abc, {CodecId::Raw, 0, nullptr});
  const FrameResult r = decompress_frame(frame);
  CHECK(r.payload == abc);
  CHECK(r.consumed == 12);
}

TEST_CASE("round-trip across the codec matrix") {
  std::mt19937_64 rng(13);
  std::vector<Bytes> inputs = {
      Bytes(5000, 0),
      random_bytes(rng, 5000),
      text_like(rng, 5000),
      Bytes(1, 0xAB),
  };
  for (const auto& [codec, level] : kMatrix) {
    CompressionSettings s{codec, level, nullptr};
    for (const Bytes& input : inputs) {
      const Bytes frame = compress_frame(input, s);
      CHECK(frame.size() <= input.size() + kFrameHeaderSize);  // raw fallback
      const FrameResult r = decompress_frame(frame);
      CHECK(r.payload == input);
      CHECK(r.consumed == frame.size());
    }
  }
}

TEST_CASE("decompress_frame error paths") {
  const Bytes frame = compress_frame(Bytes(4096, 0), {CodecId::Zstd, 3, nullptr});

  SUBCASE("unknown tag") {
    Bytes bad = frame;
    bad[0] = 'Q';
    CHECK_THROWS_AS(decompress_frame(bad), UnknownTag);
  }
  SUBCASE("truncated header") {
    CHECK_THROWS_AS(decompress_frame(Bytes(5, 0x52)), TruncatedFrame);
  }
  SUBCASE("truncated payload") {
    Bytes bad(frame.begin(), frame.end() - 1);
    CHECK_THROWS_AS(decompress_frame(bad), TruncatedFrame);
  }
  SUBCASE("corrupted u_size") {
    Bytes bad = frame;
    bad[6] ^= 0x01;
    CHECK_THROWS_AS(decompress_frame(bad), SizeMismatch);
  }
}

TEST_CASE("compress_buffer splits at the 3-byte boundary") {
  CompressionSettings raw{CodecId::Raw, 0, nullptr};

  const Bytes exact(kMaxFramePayload, 0x55);
  const Bytes framed1 = compress_buffer(exact, raw);
  CHECK(count_frames(framed1) == 1);
  CHECK(decompress_buffer(framed1, exact.size()) == exact);

  const Bytes plus1(kMaxFramePayload + 1, 0x55);
  const Bytes framed2 = compress_buffer(plus1, raw);
  CHECK(count_frames(framed2) == 2);
  // second frame carries exactly one byte
  const std::size_t first_len = kFrameHeaderSize + kMaxFramePayload;
  CHECK(framed2[first_len + 6] == 1);
  CHECK(framed2[first_len + 7] == 0);
  CHECK(framed2[first_len + 8] == 0);
  CHECK(decompress_buffer(framed2, plus1.size()) == plus1);

  CHECK_THROWS_AS(decompress_buffer(framed2, plus1.size() + 1),
                  TotalSizeMismatch);
}

TEST_CASE("large random buffer round-trips in multiple frames") {
  std::mt19937_64 rng(37);
  const Bytes big = random_bytes(rng, 40 << 20);
  const Bytes framed = compress_buffer(big, {CodecId::Lz4, 1, nullptr});
  CHECK(count_frames(framed) == 3);
  CHECK(framed.size() <= big.size() + 3 * kFrameHeaderSize);
  CHECK(decompress_buffer(framed, big.size()) == big);
}

TEST_CASE("dictionary training") {
  CHECK_THROWS_AS(train_dictionary({}, 16384), InsufficientSamples);
  CHECK_THROWS_AS(train_dictionary(std::vector<Bytes>(8, Bytes(4, 1)), 16384),
                  InsufficientSamples);

  const std::vector<Bytes> records = make_similar_records(128, 99);
  std::string warning;
  const Dictionary dict = train_dictionary(records, 16 * 1024, &warning);
  CHECK(dict.blob.size() <= 16 * 1024);
  CHECK(!dict.blob.empty());
  CHECK(warning.empty());  // 128 samples clears the 100-sample guidance

  const std::vector<Bytes> few(records.begin(), records.begin() + 32);
  std::string few_warning;
  const Dictionary small = train_dictionary(few, 16 * 1024, &few_warning);
  CHECK(!small.blob.empty());
  CHECK(!few_warning.empty());
}

TEST_CASE("dictionary improves compression of small similar records") {
  const std::vector<Bytes> records = make_similar_records(128, 123);
  const auto dict =
      std::make_shared<Dictionary>(train_dictionary(records, 16 * 1024));

  std::size_t plain = 0, with_dict = 0;
  CompressionSettings s_plain{CodecId::Zstd, 3, nullptr};
  CompressionSettings s_dict{CodecId::Zstd, 3, dict};
  for (const Bytes& rec : records) {
    plain += compress_buffer(rec, s_plain).size();
    const Bytes framed = compress_buffer(rec, s_dict);
    with_dict += framed.size();
    CHECK(decompress_buffer(framed, rec.size(), dict.get()) == rec);
  }
  CHECK(with_dict < plain);
}

TEST_CASE("dictionary training is deterministic") {
  const std::vector<Bytes> records = make_similar_records(128, 7);
  CHECK(train_dictionary(records, 8192).blob ==
        train_dictionary(records, 8192).blob);
}

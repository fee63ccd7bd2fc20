#include <doctest.h>

#include <random>

#include "bkio/codec.hpp"
#include "bkio/precond.hpp"

using namespace bkio;

namespace {

// Index-formula oracle: out[j*n + i] = in[i*e + j] via an explicit double loop.
Bytes shuffle_oracle(const Bytes& in, std::size_t e) {
  const std::size_t n = in.size() / e;
  Bytes out(in.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < e; ++j)
      out[j * n + i] = in[i * e + j];
  return out;
}

// Naive per-bit oracle: walks every (plane, element) pair one bit at a time.
Bytes bitshuffle_oracle(const Bytes& in, std::size_t e) {
  const std::size_t n = in.size() / e;
  Bytes out(in.size(), 0);
  for (std::size_t b = 0; b < 8 * e; ++b) {
    for (std::size_t el = 0; el < n; ++el) {
      const unsigned bit = (in[el * e + b / 8] >> (b % 8)) & 1u;
      if (bit) out[b * (n / 8) + el / 8] |= 1u << (el % 8);
    }
  }
  return out;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> byte(0, 255);
  Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

}  // namespace

TEST_CASE("shuffle basics") {
  const Bytes data = {0xA0, 0xA1, 0xB0, 0xB1};
  CHECK(shuffle(data, 1) == data);
  CHECK(shuffle(data, 2) == Bytes{0xA0, 0xB0, 0xA1, 0xB1});
  CHECK(unshuffle(shuffle(data, 2), 2) == data);
  CHECK_THROWS_AS(shuffle(Bytes{1, 2, 3}, 2), BadStride);
  CHECK_THROWS_AS(unshuffle(Bytes{1, 2, 3}, 2), BadStride);

  std::mt19937_64 rng(3);
  const Bytes three = random_bytes(rng, 12);
  CHECK(shuffle(three, 4) == shuffle_oracle(three, 4));
}

TEST_CASE("shuffle matches oracle and round-trips on random buffers") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> stride(1, 16);
  std::uniform_int_distribution<std::size_t> count(0, 200);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t e = stride(rng);
    const Bytes data = random_bytes(rng, e * count(rng));
    const Bytes s = shuffle(data, e);
    CHECK(s == shuffle_oracle(data, e));
    CHECK(unshuffle(s, e) == data);
  }
}

TEST_CASE("bitshuffle examples") {
  CHECK(bitshuffle(Bytes(16, 0), 2) == Bytes(16, 0));
  CHECK(unbitshuffle(bitshuffle(Bytes(16, 0), 2), 2) == Bytes(16, 0));

  const Bytes ones(8, 0x01);
  CHECK(bitshuffle(ones, 1) == Bytes{0xFF, 0, 0, 0, 0, 0, 0, 0});
  CHECK(bitshuffle(ones, 1) == bitshuffle_oracle(ones, 1));

  const Bytes high(8, 0x80);
  CHECK(bitshuffle(high, 1) == Bytes{0, 0, 0, 0, 0, 0, 0, 0xFF});
  CHECK(bitshuffle(high, 1) == bitshuffle_oracle(high, 1));

  CHECK(unbitshuffle(Bytes{0xFF, 0, 0, 0, 0, 0, 0, 0}, 1) == ones);

  CHECK_THROWS_AS(bitshuffle(Bytes(9, 0), 2), BadStride);
  CHECK_THROWS_AS(bitshuffle(Bytes(12, 0), 2), CountNotMultipleOf8);
  CHECK_THROWS_AS(unbitshuffle(Bytes(12, 0), 2), CountNotMultipleOf8);
}

TEST_CASE("bitshuffle matches oracle and round-trips on random buffers") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> stride(1, 8);
  std::uniform_int_distribution<std::size_t> groups(1, 16);  // count = 8*groups
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t e = stride(rng);
    const Bytes data = random_bytes(rng, e * 8 * groups(rng));
    const Bytes b = bitshuffle(data, e);
    CHECK(b == bitshuffle_oracle(data, e));
    CHECK(unbitshuffle(b, e) == data);
  }
}

TEST_CASE("byte_stream_split equals shuffle byte-for-byte") {
  const Bytes one = {42};
  CHECK(byte_stream_split(one, 1) == one);

  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::size_t> stride(1, 16);
  std::uniform_int_distribution<std::size_t> count(0, 200);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t e = stride(rng);
    const Bytes data = random_bytes(rng, e * count(rng));
    CHECK(byte_stream_split(data, e) == shuffle(data, e));
    CHECK(byte_stream_merge(byte_stream_split(data, e), e) == data);
  }
}

TEST_CASE("byte_stream_split groups constant upper bytes into runs") {
  // Four f32 values in [64, 128): exponent and sign bytes are constant.
  std::vector<float> vals = {100.0f, 101.5f, 96.25f, 127.0f};
  const Bytes data = pack_values<float>(vals);
  const Bytes split = byte_stream_split(data, 4);
  // Stream 3 (the high byte of each value) is the last n bytes.
  const std::size_t n = vals.size();
  for (std::size_t i = 1; i < n; ++i)
    CHECK(split[3 * n + i] == split[3 * n]);
}

TEST_CASE("shuffle improves LZ4 on floats with constant exponent bytes") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<float> vals(64.0f, 128.0f);
  std::vector<float> data(4096);
  for (auto& v : data) v = vals(rng);
  const Bytes raw = pack_values<float>(data);

  CompressionSettings lz4{CodecId::Lz4, 1, nullptr};
  const std::size_t plain = compress_buffer(raw, lz4).size();
  const std::size_t shuffled = compress_buffer(shuffle(raw, 4), lz4).size();
  CHECK(shuffled < plain);
}

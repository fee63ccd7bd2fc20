#include <doctest.h>

#include <random>

#include "bkio/model.hpp"

using namespace bkio;

namespace {

// Independent oracle: per-event start offsets by plain accumulation.
std::vector<std::uint32_t> offset_oracle(const std::vector<Bytes>& events) {
  std::vector<std::uint32_t> offsets;
  std::uint32_t pos = 0;
  for (const Bytes& ev : events) {
    offsets.push_back(pos);
    pos += static_cast<std::uint32_t>(ev.size());
  }
  return offsets;
}

std::vector<std::uint32_t> decode_offsets(const Bytes& blob) {
  return unpack_values<std::uint32_t>(blob);
}

}  // namespace

TEST_CASE("serialize_variable_column: empty input") {
  auto [data, offsets] = serialize_variable_column({}, 4);
  CHECK(data.empty());
  CHECK(offsets.empty());
}

TEST_CASE("serialize_variable_column: single element") {
  std::vector<std::vector<std::int32_t>> events = {{7}};
  auto [data, offsets] =
      serialize_variable_column(std::span<const std::vector<std::int32_t>>(events));
  CHECK(data == Bytes{0x07, 0x00, 0x00, 0x00});
  CHECK(decode_offsets(offsets) == std::vector<std::uint32_t>{0});
}

TEST_CASE("serialize_variable_column: offsets accumulate byte lengths") {
  std::vector<std::vector<std::int32_t>> events = {{1, 2}, {}, {3}};
  auto [data, offsets] =
      serialize_variable_column(std::span<const std::vector<std::int32_t>>(events));
  CHECK(data.size() == 12);
  CHECK(load_le<std::int32_t>(data.data()) == 1);
  CHECK(load_le<std::int32_t>(data.data() + 4) == 2);
  CHECK(load_le<std::int32_t>(data.data() + 8) == 3);
  CHECK(decode_offsets(offsets) == std::vector<std::uint32_t>{0, 8, 8});

  std::vector<Bytes> raw;
  for (const auto& ev : events)
    raw.push_back(pack_values<std::int32_t>(ev));
  CHECK(decode_offsets(offsets) == offset_oracle(raw));
}

TEST_CASE("deserialize_variable_column: empty and errors") {
  CHECK(deserialize_variable_column({}, {}, 4).empty());

  SUBCASE("decreasing offsets") {
    Bytes data(16, 0);
    Bytes offsets = pack_values<std::uint32_t>(std::vector<std::uint32_t>{8, 0});
    CHECK_THROWS_AS(deserialize_variable_column(data, offsets, 4),
                    MalformedOffsets);
  }
  SUBCASE("offset exceeds data length") {
    Bytes data(4, 0);
    Bytes offsets = pack_values<std::uint32_t>(std::vector<std::uint32_t>{0, 8});
    CHECK_THROWS_AS(deserialize_variable_column(data, offsets, 4),
                    MalformedOffsets);
  }
  SUBCASE("offset not a multiple of element width") {
    Bytes data(8, 0);
    Bytes offsets = pack_values<std::uint32_t>(std::vector<std::uint32_t>{0, 3});
    CHECK_THROWS_AS(deserialize_variable_column(data, offsets, 4),
                    MalformedOffsets);
  }
  SUBCASE("nonzero first offset") {
    Bytes data(8, 0);
    Bytes offsets = pack_values<std::uint32_t>(std::vector<std::uint32_t>{4, 8});
    CHECK_THROWS_AS(deserialize_variable_column(data, offsets, 4),
                    MalformedOffsets);
  }
}

TEST_CASE("variable column round-trip on random arrays") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> n_events(0, 20);
  std::uniform_int_distribution<int> n_elems(0, 10);
  std::uniform_int_distribution<int> byte(0, 255);
  const std::size_t widths[] = {1, 4, 8};

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t w = widths[trial % 3];
    std::vector<Bytes> events(n_events(rng));
    for (Bytes& ev : events) {
      ev.resize(static_cast<std::size_t>(n_elems(rng)) * w);
      for (auto& b : ev) b = static_cast<std::uint8_t>(byte(rng));
    }
    auto [data, offsets] =
        serialize_variable_column(std::span<const Bytes>(events), w);

    // invariants
    std::size_t total = 0;
    for (const Bytes& ev : events) total += ev.size();
    CHECK(data.size() == total);
    auto decoded = decode_offsets(offsets);
    CHECK(decoded == offset_oracle(events));
    for (std::size_t i = 1; i < decoded.size(); ++i)
      CHECK(decoded[i] >= decoded[i - 1]);
    if (!decoded.empty()) CHECK(decoded[0] == 0);

    CHECK(deserialize_variable_column(data, offsets, w) == events);
  }
}

TEST_CASE("fixed column serialization") {
  CHECK(serialize_fixed_column<std::int32_t>({}).empty());
  std::vector<std::int32_t> vals = {1, 2};
  CHECK(serialize_fixed_column<std::int32_t>(vals) ==
        Bytes{0x01, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00});

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> dist;
  std::vector<std::int64_t> scalars(1000);
  for (auto& v : scalars) v = dist(rng);
  CHECK(deserialize_fixed_column<std::int64_t>(
            serialize_fixed_column<std::int64_t>(scalars)) == scalars);

  std::vector<double> reals(1000);
  std::normal_distribution<double> nd;
  for (auto& v : reals) v = nd(rng);
  CHECK(deserialize_fixed_column<double>(
            serialize_fixed_column<double>(reals)) == reals);
}

#include "bkio/model.hpp"

namespace bkio {

std::size_t element_width(ElementType type) {
  switch (type) {
    case ElementType::I32:
    case ElementType::F32:
      return 4;
    case ElementType::I64:
    case ElementType::F64:
      return 8;
    case ElementType::U8:
      return 1;
  }
  throw Error("unknown element type");
}

std::string to_string(ElementType type) {
  switch (type) {
    case ElementType::I32: return "i32";
    case ElementType::I64: return "i64";
    case ElementType::F32: return "f32";
    case ElementType::F64: return "f64";
    case ElementType::U8: return "u8";
  }
  throw Error("unknown element type");
}

ElementType element_type_from_string(const std::string& s) {
  if (s == "i32") return ElementType::I32;
  if (s == "i64") return ElementType::I64;
  if (s == "f32") return ElementType::F32;
  if (s == "f64") return ElementType::F64;
  if (s == "u8") return ElementType::U8;
  throw Error("unknown element type: " + s);
}

std::pair<Bytes, Bytes> serialize_variable_column(std::span<const Bytes> events,
                                                  std::size_t element_width) {
  std::size_t total = 0;
  for (const Bytes& ev : events) {
    if (ev.size() % element_width != 0)
      throw MalformedOffsets("event byte length not a multiple of element width");
    total += ev.size();
  }
  if (total > 0xFFFFFFFFull)
    throw MalformedOffsets("data blob exceeds u32 offset range");

  Bytes data;
  data.reserve(total);
  Bytes offsets(events.size() * kOffsetWidth);
  std::uint32_t pos = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    store_le<std::uint32_t>(offsets.data() + i * kOffsetWidth, pos);
    data.insert(data.end(), events[i].begin(), events[i].end());
    pos += static_cast<std::uint32_t>(events[i].size());
  }
  return {std::move(data), std::move(offsets)};
}

std::vector<Bytes> deserialize_variable_column(ByteSpan data_blob,
                                               ByteSpan offsets_blob,
                                               std::size_t element_width) {
  if (offsets_blob.size() % kOffsetWidth != 0)
    throw MalformedOffsets("offsets blob length not a multiple of 4");
  if (data_blob.size() % element_width != 0)
    throw MalformedOffsets("data blob length not a multiple of element width");

  const std::size_t count = offsets_blob.size() / kOffsetWidth;
  std::vector<Bytes> events(count);
  if (count == 0) {
    if (!data_blob.empty())
      throw MalformedOffsets("data without offsets");
    return events;
  }

  std::uint32_t prev = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t off =
        load_le<std::uint32_t>(offsets_blob.data() + i * kOffsetWidth);
    if (i == 0 && off != 0)
      throw MalformedOffsets("first offset is not zero");
    if (off < prev)
      throw MalformedOffsets("offsets decrease");
    if (off > data_blob.size())
      throw MalformedOffsets("offset exceeds data length");
    if (off % element_width != 0)
      throw MalformedOffsets("offset not a multiple of element width");
    if (i > 0)
      events[i - 1].assign(data_blob.begin() + prev, data_blob.begin() + off);
    prev = off;
  }
  events[count - 1].assign(data_blob.begin() + prev, data_blob.end());
  return events;
}

}  // namespace bkio

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bkio/errors.hpp"

namespace bkio {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

enum class ElementType : std::uint8_t { I32, I64, F32, F64, U8 };
enum class Arity : std::uint8_t { Fixed, Variable };

std::size_t element_width(ElementType type);
std::string to_string(ElementType type);
ElementType element_type_from_string(const std::string& s);

struct ColumnSchema {
  std::string name;
  ElementType element_type = ElementType::F32;
  Arity arity = Arity::Fixed;

  std::size_t width() const { return element_width(element_type); }
  bool operator==(const ColumnSchema&) const = default;
};

/// One column's slice of an event batch. Exactly one of the two members is
/// populated, according to the column's arity: `fixed` holds event_count
/// elements back to back, `var` holds one element buffer per event.
struct ColumnChunk {
  Bytes fixed;
  std::vector<Bytes> var;
};

struct EventBatch {
  std::uint64_t event_count = 0;
  std::vector<ColumnChunk> columns;
};

// Byte offsets in a serialized variable column are u32 little-endian.
inline constexpr std::size_t kOffsetWidth = 4;

struct BasketPayload {
  Bytes data_blob;
  Bytes offsets_blob;  // empty for fixed columns
  std::uint64_t event_count = 0;
  std::uint64_t first_event = 0;
};

// --- little-endian scalar packing -----------------------------------------

template <typename T>
void store_le(std::uint8_t* dst, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (sizeof(T) == 1) {
    dst[0] = static_cast<std::uint8_t>(std::bit_cast<std::uint8_t>(value));
  } else {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
      dst[i] = static_cast<std::uint8_t>(u >> (8 * i));
  }
}

template <typename T>
T load_le(const std::uint8_t* src) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (sizeof(T) == 1) {
    return std::bit_cast<T>(src[0]);
  } else {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<U>(src[i]) << (8 * i);
    return std::bit_cast<T>(u);
  }
}

template <typename T>
Bytes pack_values(std::span<const T> values) {
  Bytes out(values.size() * sizeof(T));
  for (std::size_t i = 0; i < values.size(); ++i)
    store_le(out.data() + i * sizeof(T), values[i]);
  return out;
}

template <typename T>
std::vector<T> unpack_values(ByteSpan bytes) {
  if (bytes.size() % sizeof(T) != 0)
    throw MalformedOffsets("byte length not a multiple of element width");
  std::vector<T> out(bytes.size() / sizeof(T));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = load_le<T>(bytes.data() + i * sizeof(T));
  return out;
}

// --- column serialization --------------------------------------------------

/// Concatenates per-event element buffers and records, per event, the byte
/// offset of its first element (u32 little-endian). Each event buffer must be
/// a multiple of element_width long.
std::pair<Bytes, Bytes> serialize_variable_column(
    std::span<const Bytes> events, std::size_t element_width);

/// Inverse of serialize_variable_column. Throws MalformedOffsets when the
/// offsets decrease, exceed the data length, start off zero, or are not
/// multiples of element_width.
std::vector<Bytes> deserialize_variable_column(ByteSpan data_blob,
                                               ByteSpan offsets_blob,
                                               std::size_t element_width);

template <typename T>
std::pair<Bytes, Bytes> serialize_variable_column(
    std::span<const std::vector<T>> events) {
  std::vector<Bytes> raw(events.size());
  for (std::size_t i = 0; i < events.size(); ++i)
    raw[i] = pack_values<T>(events[i]);
  return serialize_variable_column(std::span<const Bytes>(raw), sizeof(T));
}

template <typename T>
Bytes serialize_fixed_column(std::span<const T> values) {
  return pack_values(values);
}

template <typename T>
std::vector<T> deserialize_fixed_column(ByteSpan data_blob) {
  return unpack_values<T>(data_blob);
}

}  // namespace bkio

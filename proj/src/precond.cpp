#include "bkio/precond.hpp"

namespace bkio {

namespace {

std::size_t checked_count(ByteSpan data, std::size_t elem_size) {
  if (elem_size < 1)
    throw BadStride("element size must be at least 1");
  if (data.size() % elem_size != 0)
    throw BadStride("length not a multiple of element size");
  return data.size() / elem_size;
}

}  // namespace

std::string to_string(PrecondId id) {
  switch (id) {
    case PrecondId::None: return "none";
    case PrecondId::Shuffle: return "shuffle";
    case PrecondId::BitShuffle: return "bitshuffle";
    case PrecondId::ByteStreamSplit: return "bss";
  }
  throw Error("unknown precond id");
}

PrecondId precond_from_string(const std::string& s) {
  if (s == "none") return PrecondId::None;
  if (s == "shuffle") return PrecondId::Shuffle;
  if (s == "bitshuffle") return PrecondId::BitShuffle;
  if (s == "bss" || s == "byte_stream_split") return PrecondId::ByteStreamSplit;
  throw Error("unknown precond: " + s);
}

Bytes shuffle(ByteSpan data, std::size_t elem_size) {
  const std::size_t n = checked_count(data, elem_size);
  Bytes out(data.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < elem_size; ++j)
      out[j * n + i] = data[i * elem_size + j];
  return out;
}

Bytes unshuffle(ByteSpan data, std::size_t elem_size) {
  const std::size_t n = checked_count(data, elem_size);
  Bytes out(data.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < elem_size; ++j)
      out[i * elem_size + j] = data[j * n + i];
  return out;
}

Bytes bitshuffle(ByteSpan data, std::size_t elem_size) {
  const std::size_t n = checked_count(data, elem_size);
  if (n % 8 != 0)
    throw CountNotMultipleOf8("element count not a multiple of 8");
  const std::size_t plane_bytes = n / 8;
  Bytes out(data.size(), 0);
  for (std::size_t b = 0; b < 8 * elem_size; ++b) {
    std::uint8_t* plane = out.data() + b * plane_bytes;
    const std::size_t byte_idx = b >> 3;
    const unsigned bit_idx = static_cast<unsigned>(b & 7);
    for (std::size_t e = 0; e < n; ++e) {
      const unsigned bit = (data[e * elem_size + byte_idx] >> bit_idx) & 1u;
      plane[e >> 3] |= static_cast<std::uint8_t>(bit << (e & 7));
    }
  }
  return out;
}

Bytes unbitshuffle(ByteSpan data, std::size_t elem_size) {
  const std::size_t n = checked_count(data, elem_size);
  if (n % 8 != 0)
    throw CountNotMultipleOf8("element count not a multiple of 8");
  const std::size_t plane_bytes = n / 8;
  Bytes out(data.size(), 0);
  for (std::size_t b = 0; b < 8 * elem_size; ++b) {
    const std::uint8_t* plane = data.data() + b * plane_bytes;
    const std::size_t byte_idx = b >> 3;
    const unsigned bit_idx = static_cast<unsigned>(b & 7);
    for (std::size_t e = 0; e < n; ++e) {
      const unsigned bit = (plane[e >> 3] >> (e & 7)) & 1u;
      out[e * elem_size + byte_idx] |= static_cast<std::uint8_t>(bit << bit_idx);
    }
  }
  return out;
}

Bytes byte_stream_split(ByteSpan data, std::size_t elem_size) {
  return shuffle(data, elem_size);
}

Bytes byte_stream_merge(ByteSpan data, std::size_t elem_size) {
  return unshuffle(data, elem_size);
}

Bytes apply_precond(PrecondId id, ByteSpan data, std::size_t elem_size) {
  switch (id) {
    case PrecondId::None: return Bytes(data.begin(), data.end());
    case PrecondId::Shuffle: return shuffle(data, elem_size);
    case PrecondId::BitShuffle: return bitshuffle(data, elem_size);
    case PrecondId::ByteStreamSplit: return byte_stream_split(data, elem_size);
  }
  throw Error("unknown precond id");
}

Bytes invert_precond(PrecondId id, ByteSpan data, std::size_t elem_size) {
  switch (id) {
    case PrecondId::None: return Bytes(data.begin(), data.end());
    case PrecondId::Shuffle: return unshuffle(data, elem_size);
    case PrecondId::BitShuffle: return unbitshuffle(data, elem_size);
    case PrecondId::ByteStreamSplit: return byte_stream_merge(data, elem_size);
  }
  throw Error("unknown precond id");
}

}  // namespace bkio

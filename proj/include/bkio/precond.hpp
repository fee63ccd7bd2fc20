#pragma once

#include <cstdint>
#include <string>

#include "bkio/model.hpp"

namespace bkio {

/// Byte/bit rearrangement applied to a blob before compression. The numeric
/// values are part of the basket directory format.
enum class PrecondId : std::uint8_t {
  None = 0,
  Shuffle = 1,
  BitShuffle = 2,
  ByteStreamSplit = 3,
};

std::string to_string(PrecondId id);
PrecondId precond_from_string(const std::string& s);

/// Byte-transpose: output[j*n + i] = input[i*elem_size + j] with
/// n = len / elem_size. Throws BadStride if len is not a multiple of
/// elem_size.
Bytes shuffle(ByteSpan data, std::size_t elem_size);
Bytes unshuffle(ByteSpan data, std::size_t elem_size);

/// Bit-plane transpose. Planes are emitted in ascending bit index
/// (bit 0 = LSB of byte 0 of each element); within a plane, element bits are
/// packed LSB-first. Requires the element count to be a multiple of 8.
Bytes bitshuffle(ByteSpan data, std::size_t elem_size);
Bytes unbitshuffle(ByteSpan data, std::size_t elem_size);

/// Splits byte k of every element into stream k. Byte-identical to shuffle;
/// kept as a distinct id because it is selected per column as a
/// floating-point encoding.
Bytes byte_stream_split(ByteSpan data, std::size_t elem_size);
Bytes byte_stream_merge(ByteSpan data, std::size_t elem_size);

Bytes apply_precond(PrecondId id, ByteSpan data, std::size_t elem_size);
Bytes invert_precond(PrecondId id, ByteSpan data, std::size_t elem_size);

}  // namespace bkio

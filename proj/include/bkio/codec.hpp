#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "bkio/model.hpp"

namespace bkio {

/// Compression algorithm selector. Numeric values and two-byte ASCII tags are
/// part of the frame wire format; id 3 is reserved and unused.
enum class CodecId : std::uint8_t {
  Raw = 0,
  Deflate = 1,
  Lzma = 2,
  Lz4 = 4,
  Zstd = 5,
};

const char* codec_tag(CodecId id);  // two ASCII bytes
CodecId codec_from_tag(const std::uint8_t* tag);
std::string to_string(CodecId id);
CodecId codec_from_string(const std::string& s);
int default_level(CodecId id);
bool level_valid(CodecId id, int level);

/// Trained shared-pattern blob for Zstd; immutable after training.
struct Dictionary {
  Bytes blob;
};

struct CompressionSettings {
  CodecId codec = CodecId::Zstd;
  int level = 3;
  std::shared_ptr<const Dictionary> dictionary;  // Zstd only
};

inline constexpr std::size_t kFrameHeaderSize = 9;
inline constexpr std::size_t kMaxFramePayload = 0xFFFFFF;  // 3-byte sizes

/// Frame layout: tag[2] | method[1] | c_size[3 LE] | u_size[3 LE] | payload.
/// The method byte carries the compression level (0 for Raw) and is
/// informational on decode. Falls back to a Raw frame whenever the codec
/// output would be at least as large as the input, so the framed size never
/// exceeds len(payload) + 9.
Bytes compress_frame(ByteSpan payload, const CompressionSettings& settings);

struct FrameResult {
  Bytes payload;
  std::size_t consumed = 0;
};

FrameResult decompress_frame(ByteSpan frame, const Dictionary* dict = nullptr);

/// Splits payloads larger than the 3-byte size limit across consecutive
/// frames.
Bytes compress_buffer(ByteSpan payload, const CompressionSettings& settings);
Bytes decompress_buffer(ByteSpan frames, std::size_t expected_size,
                        const Dictionary* dict = nullptr);

/// Trains a Zstd dictionary from sample buffers. Requires at least 8 samples
/// totalling at least 1 KiB; emits a warning (when `warning` is non-null) if
/// fewer than 100 samples are supplied, since dictionaries work best when
/// assembled from over 100 similar files.
Dictionary train_dictionary(const std::vector<Bytes>& samples,
                            std::size_t capacity,
                            std::string* warning = nullptr);

}  // namespace bkio

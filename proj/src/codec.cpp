#include "bkio/codec.hpp"

#include <lz4.h>
#include <lz4hc.h>
#include <lzma.h>
#include <zlib.h>
#include <zstd.h>
#include <zstd_errors.h>

#include <zdict.h>

#include <algorithm>
#include <cstring>
#include <limits>

namespace bkio {

namespace {

struct TagEntry {
  CodecId id;
  const char* tag;
};

constexpr TagEntry kTags[] = {
    {CodecId::Raw, "RW"},     {CodecId::Deflate, "ZL"}, {CodecId::Lzma, "XZ"},
    {CodecId::Lz4, "L4"},     {CodecId::Zstd, "ZS"},
};

void put_u24(std::uint8_t* dst, std::size_t v) {
  dst[0] = static_cast<std::uint8_t>(v);
  dst[1] = static_cast<std::uint8_t>(v >> 8);
  dst[2] = static_cast<std::uint8_t>(v >> 16);
}

std::size_t get_u24(const std::uint8_t* src) {
  return static_cast<std::size_t>(src[0]) |
         (static_cast<std::size_t>(src[1]) << 8) |
         (static_cast<std::size_t>(src[2]) << 16);
}

void validate_settings(const CompressionSettings& s) {
  if (!level_valid(s.codec, s.level))
    throw InvalidSettings("level " + std::to_string(s.level) +
                          " out of range for codec " + to_string(s.codec));
  if (s.dictionary && s.codec != CodecId::Zstd)
    throw InvalidSettings("dictionary only permitted with zstd");
}

// Returns the compressed bytes, or an empty vector when the codec could not
// shrink the payload (the caller then emits a Raw frame).
Bytes compress_body(ByteSpan payload, const CompressionSettings& s) {
  switch (s.codec) {
    case CodecId::Raw:
      return {};
    case CodecId::Deflate: {
      uLongf bound = compressBound(static_cast<uLong>(payload.size()));
      Bytes out(bound);
      int rc = compress2(out.data(), &bound, payload.data(),
                         static_cast<uLong>(payload.size()), s.level);
      if (rc != Z_OK)
        throw CodecFailure("zlib compress2 failed: " + std::to_string(rc));
      out.resize(bound);
      return out;
    }
    case CodecId::Lzma: {
      std::size_t bound = lzma_stream_buffer_bound(payload.size());
      Bytes out(bound);
      std::size_t out_pos = 0;
      lzma_ret rc = lzma_easy_buffer_encode(
          static_cast<std::uint32_t>(s.level), LZMA_CHECK_NONE, nullptr,
          payload.data(), payload.size(), out.data(), &out_pos, out.size());
      if (rc != LZMA_OK)
        throw CodecFailure("lzma encode failed: " + std::to_string(rc));
      out.resize(out_pos);
      return out;
    }
    case CodecId::Lz4: {
      int bound = LZ4_compressBound(static_cast<int>(payload.size()));
      Bytes out(static_cast<std::size_t>(bound));
      int written;
      if (s.level <= 1) {
        written = LZ4_compress_default(
            reinterpret_cast<const char*>(payload.data()),
            reinterpret_cast<char*>(out.data()),
            static_cast<int>(payload.size()), bound);
      } else {
        written = LZ4_compress_HC(reinterpret_cast<const char*>(payload.data()),
                                  reinterpret_cast<char*>(out.data()),
                                  static_cast<int>(payload.size()), bound,
                                  s.level);
      }
      if (written <= 0)
        throw CodecFailure("lz4 compression failed");
      out.resize(static_cast<std::size_t>(written));
      return out;
    }
    case CodecId::Zstd: {
      std::size_t bound = ZSTD_compressBound(payload.size());
      Bytes out(bound);
      std::size_t written;
      if (s.dictionary) {
        ZSTD_CCtx* cctx = ZSTD_createCCtx();
        written = ZSTD_compress_usingDict(
            cctx, out.data(), bound, payload.data(), payload.size(),
            s.dictionary->blob.data(), s.dictionary->blob.size(), s.level);
        ZSTD_freeCCtx(cctx);
      } else {
        written = ZSTD_compress(out.data(), bound, payload.data(),
                                payload.size(), s.level);
      }
      if (ZSTD_isError(written))
        throw CodecFailure(std::string("zstd: ") + ZSTD_getErrorName(written));
      out.resize(written);
      return out;
    }
  }
  throw CodecFailure("unknown codec id");
}

Bytes decompress_body(CodecId codec, ByteSpan body, std::size_t u_size,
                      const Dictionary* dict) {
  Bytes out(u_size);
  switch (codec) {
    case CodecId::Raw:
      std::memcpy(out.data(), body.data(), u_size);
      return out;
    case CodecId::Deflate: {
      uLongf dst_len = static_cast<uLongf>(u_size);
      int rc = uncompress(out.data(), &dst_len, body.data(),
                          static_cast<uLong>(body.size()));
      if (rc == Z_BUF_ERROR)
        throw SizeMismatch("zlib output does not fit declared size");
      if (rc != Z_OK)
        throw CodecFailure("zlib uncompress failed: " + std::to_string(rc));
      if (dst_len != u_size)
        throw SizeMismatch("zlib output shorter than declared size");
      return out;
    }
    case CodecId::Lzma: {
      std::uint64_t memlimit = std::numeric_limits<std::uint64_t>::max();
      std::size_t in_pos = 0, out_pos = 0;
      lzma_ret rc =
          lzma_stream_buffer_decode(&memlimit, 0, nullptr, body.data(),
                                    &in_pos, body.size(), out.data(), &out_pos,
                                    out.size());
      if (rc == LZMA_BUF_ERROR)
        throw SizeMismatch("lzma output does not fit declared size");
      if (rc != LZMA_OK)
        throw CodecFailure("lzma decode failed: " + std::to_string(rc));
      if (out_pos != u_size)
        throw SizeMismatch("lzma output shorter than declared size");
      return out;
    }
    case CodecId::Lz4: {
      int n = LZ4_decompress_safe(reinterpret_cast<const char*>(body.data()),
                                  reinterpret_cast<char*>(out.data()),
                                  static_cast<int>(body.size()),
                                  static_cast<int>(u_size));
      if (n < 0)
        throw CodecFailure("lz4 decompression failed");
      if (static_cast<std::size_t>(n) != u_size)
        throw SizeMismatch("lz4 output length differs from declared size");
      return out;
    }
    case CodecId::Zstd: {
      std::size_t n;
      if (dict && !dict->blob.empty()) {
        ZSTD_DCtx* dctx = ZSTD_createDCtx();
        n = ZSTD_decompress_usingDict(dctx, out.data(), u_size, body.data(),
                                      body.size(), dict->blob.data(),
                                      dict->blob.size());
        ZSTD_freeDCtx(dctx);
      } else {
        n = ZSTD_decompress(out.data(), u_size, body.data(), body.size());
      }
      if (ZSTD_isError(n)) {
        if (ZSTD_getErrorCode(n) == ZSTD_error_dstSize_tooSmall)
          throw SizeMismatch("zstd output does not fit declared size");
        throw CodecFailure(std::string("zstd: ") + ZSTD_getErrorName(n));
      }
      if (n != u_size)
        throw SizeMismatch("zstd output length differs from declared size");
      return out;
    }
  }
  throw CodecFailure("unknown codec id");
}

}  // namespace

const char* codec_tag(CodecId id) {
  for (const TagEntry& e : kTags)
    if (e.id == id) return e.tag;
  throw Error("unknown codec id");
}

CodecId codec_from_tag(const std::uint8_t* tag) {
  for (const TagEntry& e : kTags)
    if (tag[0] == static_cast<std::uint8_t>(e.tag[0]) &&
        tag[1] == static_cast<std::uint8_t>(e.tag[1]))
      return e.id;
  throw UnknownTag("unknown frame tag");
}

std::string to_string(CodecId id) {
  switch (id) {
    case CodecId::Raw: return "raw";
    case CodecId::Deflate: return "zlib";
    case CodecId::Lzma: return "lzma";
    case CodecId::Lz4: return "lz4";
    case CodecId::Zstd: return "zstd";
  }
  throw Error("unknown codec id");
}

CodecId codec_from_string(const std::string& s) {
  if (s == "raw") return CodecId::Raw;
  if (s == "zlib" || s == "deflate") return CodecId::Deflate;
  if (s == "lzma" || s == "xz") return CodecId::Lzma;
  if (s == "lz4") return CodecId::Lz4;
  if (s == "zstd") return CodecId::Zstd;
  throw Error("unknown codec: " + s);
}

int default_level(CodecId id) {
  switch (id) {
    case CodecId::Raw: return 0;
    case CodecId::Deflate: return 6;
    case CodecId::Lzma: return 6;
    case CodecId::Lz4: return 1;
    case CodecId::Zstd: return 3;
  }
  throw Error("unknown codec id");
}

bool level_valid(CodecId id, int level) {
  switch (id) {
    case CodecId::Raw: return level == 0;
    case CodecId::Deflate: return level >= 1 && level <= 9;
    case CodecId::Lzma: return level >= 0 && level <= 9;
    case CodecId::Lz4: return level >= 1 && level <= LZ4HC_CLEVEL_MAX;
    case CodecId::Zstd: return level >= 1 && level <= ZSTD_maxCLevel();
  }
  return false;
}

Bytes compress_frame(ByteSpan payload, const CompressionSettings& settings) {
  if (payload.empty())
    throw EmptyPayload("cannot frame an empty payload");
  if (payload.size() > kMaxFramePayload)
    throw PayloadTooLarge("payload exceeds 3-byte size limit");
  validate_settings(settings);

  Bytes body = compress_body(payload, settings);
  CodecId codec = settings.codec;
  int level = settings.level;
  if (body.empty() || body.size() >= payload.size()) {
    body.assign(payload.begin(), payload.end());
    codec = CodecId::Raw;
    level = 0;
  }

  Bytes frame(kFrameHeaderSize + body.size());
  std::memcpy(frame.data(), codec_tag(codec), 2);
  frame[2] = static_cast<std::uint8_t>(level);
  put_u24(frame.data() + 3, body.size());
  put_u24(frame.data() + 6, payload.size());
  std::memcpy(frame.data() + kFrameHeaderSize, body.data(), body.size());
  return frame;
}

FrameResult decompress_frame(ByteSpan frame, const Dictionary* dict) {
  if (frame.size() < kFrameHeaderSize)
    throw TruncatedFrame("frame shorter than header");
  CodecId codec = codec_from_tag(frame.data());
  const std::size_t c_size = get_u24(frame.data() + 3);
  const std::size_t u_size = get_u24(frame.data() + 6);
  if (frame.size() < kFrameHeaderSize + c_size)
    throw TruncatedFrame("frame payload truncated");
  if (codec == CodecId::Raw && c_size != u_size)
    throw SizeMismatch("raw frame with c_size != u_size");

  FrameResult result;
  result.payload = decompress_body(
      codec, frame.subspan(kFrameHeaderSize, c_size), u_size, dict);
  result.consumed = kFrameHeaderSize + c_size;
  return result;
}

Bytes compress_buffer(ByteSpan payload, const CompressionSettings& settings) {
  if (payload.empty())
    throw EmptyPayload("cannot compress an empty buffer");
  Bytes out;
  for (std::size_t pos = 0; pos < payload.size(); pos += kMaxFramePayload) {
    const std::size_t len = std::min(kMaxFramePayload, payload.size() - pos);
    Bytes frame = compress_frame(payload.subspan(pos, len), settings);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

Bytes decompress_buffer(ByteSpan frames, std::size_t expected_size,
                        const Dictionary* dict) {
  Bytes out;
  out.reserve(expected_size);
  std::size_t pos = 0;
  while (pos < frames.size()) {
    FrameResult r = decompress_frame(frames.subspan(pos), dict);
    if (pos == 0 && r.consumed == frames.size())
      out = std::move(r.payload);  // single-frame fast path, skip the copy
    else
      out.insert(out.end(), r.payload.begin(), r.payload.end());
    pos += r.consumed;
  }
  if (out.size() != expected_size)
    throw TotalSizeMismatch("concatenated payloads do not match expected size");
  return out;
}

Dictionary train_dictionary(const std::vector<Bytes>& samples,
                            std::size_t capacity, std::string* warning) {
  std::size_t total = 0;
  for (const Bytes& s : samples) total += s.size();
  if (samples.size() < 8 || total < 1024)
    throw InsufficientSamples(
        "need at least 8 samples totalling at least 1 KiB");
  if (samples.size() < 100 && warning)
    *warning = "dictionary trained from " + std::to_string(samples.size()) +
               " samples; over 100 similar samples are preferable";

  Bytes concat;
  concat.reserve(total);
  std::vector<std::size_t> sizes;
  sizes.reserve(samples.size());
  for (const Bytes& s : samples) {
    concat.insert(concat.end(), s.begin(), s.end());
    sizes.push_back(s.size());
  }

  Dictionary dict;
  dict.blob.resize(capacity);
  std::size_t n = ZDICT_trainFromBuffer(dict.blob.data(), capacity,
                                        concat.data(), sizes.data(),
                                        static_cast<unsigned>(sizes.size()));
  if (ZDICT_isError(n))
    throw TrainingFailure(std::string("zdict: ") + ZDICT_getErrorName(n));
  dict.blob.resize(n);
  return dict;
}

}  // namespace bkio

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "bkio/codec.hpp"
#include "bkio/model.hpp"
#include "bkio/precond.hpp"

#include <nlohmann/json.hpp>

namespace bkio {

inline constexpr char kFileMagic[8] = {'B', 'K', 'I', 'O', 0, 1, 0, 0};
inline constexpr char kTrailerMagic[4] = {'O', 'I', 'K', 'B'};

struct FlushPolicy {
  enum class Kind { PerBasket, OnlyAtCluster };
  Kind kind = Kind::OnlyAtCluster;
  std::uint64_t param = 1000;  // max_basket_bytes or events_per_cluster

  static FlushPolicy per_basket(std::uint64_t max_basket_bytes) {
    return {Kind::PerBasket, max_basket_bytes};
  }
  static FlushPolicy only_at_cluster(std::uint64_t events_per_cluster) {
    return {Kind::OnlyAtCluster, events_per_cluster};
  }
  std::string describe() const;
};

struct ColumnCodecConfig {
  CompressionSettings settings;
  PrecondId precond = PrecondId::None;
};

struct BasketDirectoryEntry {
  std::uint32_t column_index = 0;
  std::uint64_t first_event = 0;
  std::uint64_t event_count = 0;
  std::uint64_t file_offset = 0;
  std::uint64_t framed_data_len = 0;
  std::uint64_t framed_offsets_len = 0;  // 0 for fixed columns
  std::uint64_t uncompressed_data_len = 0;
  std::uint64_t uncompressed_offsets_len = 0;
  CodecId codec = CodecId::Raw;
  int level = 0;
  PrecondId precond_applied = PrecondId::None;
};

struct FileFooter {
  std::vector<ColumnSchema> schema;
  std::uint64_t total_events = 0;
  std::vector<std::uint64_t> clusters;
  std::vector<BasketDirectoryEntry> directory;
  nlohmann::json settings;
};

nlohmann::json footer_to_json(const FileFooter& footer);
FileFooter footer_from_json(const nlohmann::json& j);

/// Buffers event batches per column, applies pre-conditioning and
/// compression at flush time, and writes the container file:
///   [magic] [baskets] [footer JSON] [footer length u64 LE] [trailer magic].
///
/// Single-owner; not safe for concurrent mutation.
class Writer {
 public:
  Writer(const std::filesystem::path& path, std::vector<ColumnSchema> schema,
         std::vector<ColumnCodecConfig> configs, FlushPolicy policy);

  void append(const EventBatch& batch);
  FileFooter close();

  std::uint64_t total_events() const { return total_events_; }

 private:
  struct ColumnBuffer {
    Bytes data;
    std::vector<std::uint32_t> offsets;  // variable columns only
    std::uint64_t first_event = 0;
    std::uint64_t events = 0;

    std::size_t payload_bytes() const {
      return data.size() + offsets.size() * kOffsetWidth;
    }
  };

  void flush_column(std::size_t col);
  void flush_all();

  std::ofstream out_;
  std::vector<ColumnSchema> schema_;
  std::vector<ColumnCodecConfig> configs_;
  FlushPolicy policy_;
  std::vector<ColumnBuffer> buffers_;
  std::vector<BasketDirectoryEntry> directory_;
  std::vector<std::uint64_t> clusters_;
  std::uint64_t total_events_ = 0;
  std::uint64_t file_pos_ = 0;
  bool closed_ = false;
};

}  // namespace bkio

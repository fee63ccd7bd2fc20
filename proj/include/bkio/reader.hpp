#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <vector>

#include "bkio/codec.hpp"
#include "bkio/writer.hpp"

namespace bkio {

/// Opens a container file, validates its structure, and reconstructs column
/// values basket by basket. Immutable after open; read_column is safe to call
/// concurrently on distinct Reader instances (a single instance shares one
/// file stream).
class Reader {
 public:
  explicit Reader(
      const std::filesystem::path& path,
      const std::map<std::string, std::filesystem::path>& dictionaries = {});

  const FileFooter& footer() const { return footer_; }
  const std::vector<ColumnSchema>& schema() const { return footer_.schema; }
  std::size_t column_index(const std::string& name) const;

  /// Reads events [begin, begin + count) of one column.
  ColumnChunk read_column(std::size_t column, std::uint64_t begin,
                          std::uint64_t count) const;

  struct ScanStats {
    std::vector<std::uint64_t> column_bytes;
    std::uint64_t total_bytes = 0;
    double seconds = 0.0;  // decompression + precond inversion + deserialization
  };

  /// Reads every basket of every column exactly once, sequentially. Only the
  /// decode path is timed; file reads and footer parsing are excluded.
  ScanStats scan_all() const;

 private:
  struct DecodedBasket {
    Bytes data;
    std::vector<Bytes> var_events;  // variable columns only
  };

  Bytes read_span(std::uint64_t offset, std::uint64_t len) const;
  DecodedBasket decode_basket(const BasketDirectoryEntry& entry,
                              const Bytes& data_framed,
                              const Bytes& offsets_framed) const;

  std::filesystem::path path_;
  mutable std::ifstream in_;
  FileFooter footer_;
  // directory entries per column, sorted by first_event
  std::vector<std::vector<BasketDirectoryEntry>> per_column_;
  std::vector<std::shared_ptr<const Dictionary>> dicts_;
};

}  // namespace bkio

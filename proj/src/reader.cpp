#include "bkio/reader.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

#include "bkio/precond.hpp"

namespace bkio {

namespace {

Bytes load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open: " + path.string());
  in.seekg(0, std::ios::end);
  Bytes out(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!in)
    throw IoError("short read: " + path.string());
  return out;
}

}  // namespace

Reader::Reader(const std::filesystem::path& path,
               const std::map<std::string, std::filesystem::path>& dictionaries)
    : path_(path) {
  in_.open(path, std::ios::binary);
  if (!in_)
    throw IoError("cannot open: " + path.string());
  in_.seekg(0, std::ios::end);
  const std::uint64_t file_size = static_cast<std::uint64_t>(in_.tellg());

  if (file_size < sizeof(kFileMagic) + 8 + sizeof(kTrailerMagic))
    throw BadMagic("file too small to be a container");

  char magic[sizeof(kFileMagic)];
  in_.seekg(0);
  in_.read(magic, sizeof(magic));
  if (std::memcmp(magic, kFileMagic, sizeof(kFileMagic)) != 0)
    throw BadMagic("bad file magic");

  char trailer[sizeof(kTrailerMagic)];
  in_.seekg(static_cast<std::streamoff>(file_size - sizeof(kTrailerMagic)));
  in_.read(trailer, sizeof(trailer));
  if (std::memcmp(trailer, kTrailerMagic, sizeof(kTrailerMagic)) != 0)
    throw BadMagic("bad trailer magic");

  std::uint8_t len_le[8];
  in_.seekg(static_cast<std::streamoff>(file_size - sizeof(kTrailerMagic) - 8));
  in_.read(reinterpret_cast<char*>(len_le), 8);
  const std::uint64_t footer_len = load_le<std::uint64_t>(len_le);
  if (footer_len >
      file_size - sizeof(kFileMagic) - sizeof(kTrailerMagic) - 8)
    throw CorruptFooter("footer length out of bounds");

  std::string json(footer_len, '\0');
  in_.seekg(static_cast<std::streamoff>(file_size - sizeof(kTrailerMagic) - 8 -
                                        footer_len));
  in_.read(json.data(), static_cast<std::streamsize>(footer_len));
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFooter(std::string("unparseable footer: ") + e.what());
  }
  footer_ = footer_from_json(parsed);

  // Validate clusters and the per-column directory partition.
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < footer_.clusters.size(); ++i) {
    if (footer_.clusters[i] <= prev && i > 0)
      throw CorruptFooter("cluster boundaries not strictly increasing");
    prev = footer_.clusters[i];
  }
  if (footer_.total_events > 0 &&
      (footer_.clusters.empty() || footer_.clusters.back() != footer_.total_events))
    throw CorruptFooter("cluster boundaries do not end at total_events");

  per_column_.resize(footer_.schema.size());
  for (const BasketDirectoryEntry& e : footer_.directory) {
    if (e.column_index >= footer_.schema.size())
      throw CorruptFooter("directory entry references unknown column");
    per_column_[e.column_index].push_back(e);
  }
  for (std::size_t c = 0; c < per_column_.size(); ++c) {
    auto& entries = per_column_[c];
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) {
                return a.first_event < b.first_event;
              });
    std::uint64_t next = 0;
    for (const BasketDirectoryEntry& e : entries) {
      if (e.first_event != next)
        throw DirectoryGap("column " + footer_.schema[c].name +
                           " has a gap or overlap at event " +
                           std::to_string(next));
      next = e.first_event + e.event_count;
    }
    if (next != footer_.total_events)
      throw DirectoryGap("column " + footer_.schema[c].name +
                         " does not cover all events");
  }

  dicts_.resize(footer_.schema.size());
  for (const auto& [name, dict_path] : dictionaries) {
    const std::size_t c = column_index(name);
    auto dict = std::make_shared<Dictionary>();
    dict->blob = load_file(dict_path);
    dicts_[c] = std::move(dict);
  }
}

std::size_t Reader::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < footer_.schema.size(); ++c)
    if (footer_.schema[c].name == name) return c;
  throw Error("unknown column: " + name);
}

Bytes Reader::read_span(std::uint64_t offset, std::uint64_t len) const {
  Bytes out(len);
  in_.seekg(static_cast<std::streamoff>(offset));
  in_.read(reinterpret_cast<char*>(out.data()),
           static_cast<std::streamsize>(len));
  if (!in_)
    throw IoError("short read in basket region");
  return out;
}

Reader::DecodedBasket Reader::decode_basket(const BasketDirectoryEntry& entry,
                                            const Bytes& data_framed,
                                            const Bytes& offsets_framed) const {
  const ColumnSchema& s = footer_.schema[entry.column_index];
  const Dictionary* dict = dicts_[entry.column_index]
                               ? dicts_[entry.column_index].get()
                               : nullptr;
  DecodedBasket out;

  Bytes data;
  if (entry.uncompressed_data_len > 0) {
    Bytes pre = decompress_buffer(data_framed, entry.uncompressed_data_len, dict);
    data = entry.precond_applied == PrecondId::None
               ? std::move(pre)
               : invert_precond(entry.precond_applied, pre, s.width());
  }
  if (s.arity == Arity::Fixed) {
    out.data = std::move(data);
    return out;
  }
  Bytes offsets;
  if (entry.uncompressed_offsets_len > 0) {
    Bytes pre =
        decompress_buffer(offsets_framed, entry.uncompressed_offsets_len, dict);
    offsets = entry.precond_applied == PrecondId::None
                  ? std::move(pre)
                  : invert_precond(entry.precond_applied, pre, kOffsetWidth);
  }
  out.var_events = deserialize_variable_column(data, offsets, s.width());
  if (out.var_events.size() != entry.event_count)
    throw MalformedOffsets("offset count differs from directory event count");
  return out;
}

ColumnChunk Reader::read_column(std::size_t column, std::uint64_t begin,
                                std::uint64_t count) const {
  if (column >= footer_.schema.size())
    throw Error("column index out of range");
  if (begin + count > footer_.total_events)
    throw Error("event range out of bounds");

  const ColumnSchema& s = footer_.schema[column];
  ColumnChunk out;
  if (count == 0) return out;

  for (const BasketDirectoryEntry& e : per_column_[column]) {
    const std::uint64_t e_end = e.first_event + e.event_count;
    if (e_end <= begin || e.first_event >= begin + count) continue;

    Bytes data_framed = read_span(e.file_offset, e.framed_data_len);
    Bytes offsets_framed =
        read_span(e.file_offset + e.framed_data_len, e.framed_offsets_len);
    DecodedBasket basket = decode_basket(e, data_framed, offsets_framed);

    const std::uint64_t lo = std::max(begin, e.first_event) - e.first_event;
    const std::uint64_t hi = std::min(begin + count, e_end) - e.first_event;
    if (s.arity == Arity::Fixed) {
      const std::size_t w = s.width();
      out.fixed.insert(out.fixed.end(), basket.data.begin() + lo * w,
                       basket.data.begin() + hi * w);
    } else {
      for (std::uint64_t i = lo; i < hi; ++i)
        out.var.push_back(std::move(basket.var_events[i]));
    }
  }
  return out;
}

Reader::ScanStats Reader::scan_all() const {
  ScanStats stats;
  stats.column_bytes.assign(footer_.schema.size(), 0);
  double seconds = 0.0;
  for (std::size_t c = 0; c < footer_.schema.size(); ++c) {
    for (const BasketDirectoryEntry& e : per_column_[c]) {
      Bytes data_framed = read_span(e.file_offset, e.framed_data_len);
      Bytes offsets_framed =
          read_span(e.file_offset + e.framed_data_len, e.framed_offsets_len);
      const auto t0 = std::chrono::steady_clock::now();
      DecodedBasket basket = decode_basket(e, data_framed, offsets_framed);
      const auto t1 = std::chrono::steady_clock::now();
      seconds += std::chrono::duration<double>(t1 - t0).count();
      (void)basket;
      stats.column_bytes[c] +=
          e.uncompressed_data_len + e.uncompressed_offsets_len;
    }
    stats.total_bytes += stats.column_bytes[c];
  }
  stats.seconds = seconds;
  return stats;
}

}  // namespace bkio

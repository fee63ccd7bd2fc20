#include "bkio/writer.hpp"

#include <set>

namespace bkio {

std::string FlushPolicy::describe() const {
  if (kind == Kind::PerBasket)
    return "basket:" + std::to_string(param);
  return "cluster:" + std::to_string(param);
}

nlohmann::json footer_to_json(const FileFooter& footer) {
  nlohmann::json j;
  nlohmann::json schema = nlohmann::json::array();
  for (const ColumnSchema& c : footer.schema) {
    schema.push_back({{"name", c.name},
                      {"type", to_string(c.element_type)},
                      {"arity", c.arity == Arity::Fixed ? "fixed" : "variable"}});
  }
  j["schema"] = std::move(schema);
  j["total_events"] = footer.total_events;
  j["clusters"] = footer.clusters;
  nlohmann::json dir = nlohmann::json::array();
  for (const BasketDirectoryEntry& e : footer.directory) {
    dir.push_back({{"column_index", e.column_index},
                   {"first_event", e.first_event},
                   {"event_count", e.event_count},
                   {"file_offset", e.file_offset},
                   {"framed_data_len", e.framed_data_len},
                   {"framed_offsets_len", e.framed_offsets_len},
                   {"uncompressed_data_len", e.uncompressed_data_len},
                   {"uncompressed_offsets_len", e.uncompressed_offsets_len},
                   {"codec", static_cast<int>(e.codec)},
                   {"level", e.level},
                   {"precond_applied", static_cast<int>(e.precond_applied)}});
  }
  j["directory"] = std::move(dir);
  j["settings"] = footer.settings;
  return j;
}

FileFooter footer_from_json(const nlohmann::json& j) {
  FileFooter footer;
  try {
    for (const auto& c : j.at("schema")) {
      ColumnSchema s;
      s.name = c.at("name").get<std::string>();
      s.element_type = element_type_from_string(c.at("type").get<std::string>());
      const std::string arity = c.at("arity").get<std::string>();
      if (arity != "fixed" && arity != "variable")
        throw CorruptFooter("unknown arity: " + arity);
      s.arity = arity == "fixed" ? Arity::Fixed : Arity::Variable;
      footer.schema.push_back(std::move(s));
    }
    footer.total_events = j.at("total_events").get<std::uint64_t>();
    footer.clusters = j.at("clusters").get<std::vector<std::uint64_t>>();
    for (const auto& d : j.at("directory")) {
      BasketDirectoryEntry e;
      e.column_index = d.at("column_index").get<std::uint32_t>();
      e.first_event = d.at("first_event").get<std::uint64_t>();
      e.event_count = d.at("event_count").get<std::uint64_t>();
      e.file_offset = d.at("file_offset").get<std::uint64_t>();
      e.framed_data_len = d.at("framed_data_len").get<std::uint64_t>();
      e.framed_offsets_len = d.at("framed_offsets_len").get<std::uint64_t>();
      e.uncompressed_data_len = d.at("uncompressed_data_len").get<std::uint64_t>();
      e.uncompressed_offsets_len =
          d.at("uncompressed_offsets_len").get<std::uint64_t>();
      e.codec = static_cast<CodecId>(d.at("codec").get<int>());
      e.level = d.at("level").get<int>();
      e.precond_applied =
          static_cast<PrecondId>(d.at("precond_applied").get<int>());
      footer.directory.push_back(e);
    }
    if (j.contains("settings")) footer.settings = j.at("settings");
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFooter(std::string("footer json: ") + e.what());
  }
  return footer;
}

Writer::Writer(const std::filesystem::path& path,
               std::vector<ColumnSchema> schema,
               std::vector<ColumnCodecConfig> configs, FlushPolicy policy)
    : schema_(std::move(schema)),
      configs_(std::move(configs)),
      policy_(policy) {
  if (schema_.empty())
    throw InvalidSettings("schema must not be empty");
  if (configs_.size() != schema_.size())
    throw InvalidSettings("settings must cover all columns");
  std::set<std::string> names;
  for (const ColumnSchema& c : schema_) {
    if (c.name.empty())
      throw InvalidSettings("column name must not be empty");
    if (!names.insert(c.name).second)
      throw InvalidSettings("duplicate column name: " + c.name);
  }
  for (const ColumnCodecConfig& cfg : configs_) {
    if (!level_valid(cfg.settings.codec, cfg.settings.level))
      throw InvalidSettings("invalid level for codec " +
                            to_string(cfg.settings.codec));
    if (cfg.settings.dictionary && cfg.settings.codec != CodecId::Zstd)
      throw InvalidSettings("dictionary only permitted with zstd");
  }
  if (policy_.kind == FlushPolicy::Kind::PerBasket && policy_.param < 1024)
    throw InvalidSettings("max_basket_bytes must be at least 1024");
  if (policy_.kind == FlushPolicy::Kind::OnlyAtCluster && policy_.param < 1)
    throw InvalidSettings("events_per_cluster must be at least 1");

  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_)
    throw IoError("cannot open for writing: " + path.string());
  out_.write(kFileMagic, sizeof(kFileMagic));
  file_pos_ = sizeof(kFileMagic);

  buffers_.resize(schema_.size());
}

void Writer::append(const EventBatch& batch) {
  if (closed_) throw IoError("writer already closed");
  if (batch.columns.size() != schema_.size())
    throw SchemaMismatch("batch column count differs from schema");
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const ColumnSchema& s = schema_[c];
    const ColumnChunk& chunk = batch.columns[c];
    if (s.arity == Arity::Fixed) {
      if (chunk.fixed.size() != batch.event_count * s.width() ||
          !chunk.var.empty())
        throw SchemaMismatch("fixed column " + s.name + " shape mismatch");
    } else {
      if (chunk.var.size() != batch.event_count || !chunk.fixed.empty())
        throw SchemaMismatch("variable column " + s.name + " shape mismatch");
      for (const Bytes& ev : chunk.var)
        if (ev.size() % s.width() != 0)
          throw SchemaMismatch("variable column " + s.name +
                               " event not a multiple of element width");
    }
  }

  for (std::uint64_t e = 0; e < batch.event_count; ++e) {
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      const ColumnSchema& s = schema_[c];
      const ColumnChunk& chunk = batch.columns[c];
      ColumnBuffer& buf = buffers_[c];
      if (s.arity == Arity::Fixed) {
        const std::size_t w = s.width();
        buf.data.insert(buf.data.end(), chunk.fixed.begin() + e * w,
                        chunk.fixed.begin() + (e + 1) * w);
      } else {
        const Bytes& ev = chunk.var[e];
        if (buf.data.size() > 0xFFFFFFFFull)
          throw Error("basket data blob exceeds u32 offset range");
        buf.offsets.push_back(static_cast<std::uint32_t>(buf.data.size()));
        buf.data.insert(buf.data.end(), ev.begin(), ev.end());
      }
      ++buf.events;
    }
    ++total_events_;

    if (policy_.kind == FlushPolicy::Kind::PerBasket) {
      for (std::size_t c = 0; c < schema_.size(); ++c)
        if (buffers_[c].payload_bytes() > policy_.param) flush_column(c);
    } else if (total_events_ % policy_.param == 0) {
      flush_all();
      clusters_.push_back(total_events_);
    }
  }
}

void Writer::flush_column(std::size_t col) {
  ColumnBuffer& buf = buffers_[col];
  if (buf.events == 0) return;
  const ColumnSchema& s = schema_[col];
  const ColumnCodecConfig& cfg = configs_[col];
  const std::size_t w = s.width();

  Bytes offsets_blob;
  if (s.arity == Arity::Variable) {
    offsets_blob.resize(buf.offsets.size() * kOffsetWidth);
    for (std::size_t i = 0; i < buf.offsets.size(); ++i)
      store_le<std::uint32_t>(offsets_blob.data() + i * kOffsetWidth,
                              buf.offsets[i]);
  }

  // BitShuffle needs the element count of every blob it touches to be a
  // multiple of 8; otherwise the basket silently downgrades to Shuffle and
  // the directory records what was actually applied.
  PrecondId applied = cfg.precond;
  if (applied == PrecondId::BitShuffle) {
    const std::size_t data_count = buf.data.size() / w;
    const bool data_ok = data_count % 8 == 0;
    const bool offsets_ok =
        s.arity == Arity::Fixed || buf.offsets.size() % 8 == 0;
    if (!data_ok || !offsets_ok) applied = PrecondId::Shuffle;
  }

  BasketDirectoryEntry entry;
  entry.column_index = static_cast<std::uint32_t>(col);
  entry.first_event = buf.first_event;
  entry.event_count = buf.events;
  entry.file_offset = file_pos_;
  entry.uncompressed_data_len = buf.data.size();
  entry.uncompressed_offsets_len = offsets_blob.size();
  entry.codec = cfg.settings.codec;
  entry.level = cfg.settings.level;
  entry.precond_applied = applied;

  if (!buf.data.empty()) {
    Bytes pre = apply_precond(applied, buf.data, w);
    Bytes framed = compress_buffer(pre, cfg.settings);
    entry.framed_data_len = framed.size();
    out_.write(reinterpret_cast<const char*>(framed.data()),
               static_cast<std::streamsize>(framed.size()));
    file_pos_ += framed.size();
  }
  if (!offsets_blob.empty()) {
    Bytes pre = apply_precond(applied, offsets_blob, kOffsetWidth);
    Bytes framed = compress_buffer(pre, cfg.settings);
    entry.framed_offsets_len = framed.size();
    out_.write(reinterpret_cast<const char*>(framed.data()),
               static_cast<std::streamsize>(framed.size()));
    file_pos_ += framed.size();
  }

  directory_.push_back(entry);
  buf.first_event += buf.events;
  buf.events = 0;
  buf.data.clear();
  buf.offsets.clear();
}

void Writer::flush_all() {
  for (std::size_t c = 0; c < schema_.size(); ++c) flush_column(c);
}

FileFooter Writer::close() {
  if (closed_) throw IoError("writer already closed");
  closed_ = true;

  bool residual = false;
  for (const ColumnBuffer& b : buffers_)
    if (b.events > 0) residual = true;
  if (residual) flush_all();

  if (policy_.kind == FlushPolicy::Kind::OnlyAtCluster) {
    if (total_events_ > 0 &&
        (clusters_.empty() || clusters_.back() != total_events_))
      clusters_.push_back(total_events_);
  } else if (total_events_ > 0) {
    clusters_ = {total_events_};
  }

  FileFooter footer;
  footer.schema = schema_;
  footer.total_events = total_events_;
  footer.clusters = clusters_;
  footer.directory = directory_;
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    cols.push_back({{"column", schema_[c].name},
                    {"codec", to_string(configs_[c].settings.codec)},
                    {"level", configs_[c].settings.level},
                    {"precond", to_string(configs_[c].precond)},
                    {"dictionary", static_cast<bool>(configs_[c].settings.dictionary)}});
  }
  footer.settings = {{"policy", policy_.describe()}, {"columns", cols}};

  const std::string json = footer_to_json(footer).dump();
  out_.write(json.data(), static_cast<std::streamsize>(json.size()));
  std::uint8_t len_le[8];
  store_le<std::uint64_t>(len_le, json.size());
  out_.write(reinterpret_cast<const char*>(len_le), 8);
  out_.write(kTrailerMagic, sizeof(kTrailerMagic));
  out_.close();
  if (!out_)
    throw IoError("failed to finalize container file");
  return footer;
}

}  // namespace bkio

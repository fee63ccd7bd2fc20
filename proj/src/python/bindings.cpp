#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bkio/bench.hpp"
#include "bkio/reader.hpp"
#include "bkio/writer.hpp"

namespace py = pybind11;

namespace {

bkio::Bytes to_bytes(const py::bytes& b) {
  const std::string s = b;
  return bkio::Bytes(s.begin(), s.end());
}

py::bytes from_bytes(const bkio::Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

}  // namespace

PYBIND11_MODULE(_bkio, m) {
  m.doc() = "columnar event storage with pre-conditioned multi-codec compression";

  py::register_exception<bkio::Error>(m, "BkioError");

  py::enum_<bkio::CodecId>(m, "CodecId")
      .value("Raw", bkio::CodecId::Raw)
      .value("Deflate", bkio::CodecId::Deflate)
      .value("Lzma", bkio::CodecId::Lzma)
      .value("Lz4", bkio::CodecId::Lz4)
      .value("Zstd", bkio::CodecId::Zstd);

  py::enum_<bkio::PrecondId>(m, "PrecondId")
      .value("NoOp", bkio::PrecondId::None)
      .value("Shuffle", bkio::PrecondId::Shuffle)
      .value("BitShuffle", bkio::PrecondId::BitShuffle)
      .value("ByteStreamSplit", bkio::PrecondId::ByteStreamSplit);

  // pre-conditioners
  m.def("shuffle", [](const py::bytes& data, std::size_t elem_size) {
    return from_bytes(bkio::shuffle(to_bytes(data), elem_size));
  });
  m.def("unshuffle", [](const py::bytes& data, std::size_t elem_size) {
    return from_bytes(bkio::unshuffle(to_bytes(data), elem_size));
  });
  m.def("bitshuffle", [](const py::bytes& data, std::size_t elem_size) {
    return from_bytes(bkio::bitshuffle(to_bytes(data), elem_size));
  });
  m.def("unbitshuffle", [](const py::bytes& data, std::size_t elem_size) {
    return from_bytes(bkio::unbitshuffle(to_bytes(data), elem_size));
  });
  m.def("byte_stream_split", [](const py::bytes& data, std::size_t elem_size) {
    return from_bytes(bkio::byte_stream_split(to_bytes(data), elem_size));
  });
  m.def("byte_stream_merge", [](const py::bytes& data, std::size_t elem_size) {
    return from_bytes(bkio::byte_stream_merge(to_bytes(data), elem_size));
  });

  // framing
  m.def(
      "compress_buffer",
      [](const py::bytes& payload, bkio::CodecId codec, int level) {
        return from_bytes(
            bkio::compress_buffer(to_bytes(payload), {codec, level, nullptr}));
      },
      py::arg("payload"), py::arg("codec") = bkio::CodecId::Zstd,
      py::arg("level") = 3);
  m.def("decompress_buffer",
        [](const py::bytes& frames, std::size_t expected_size) {
          return from_bytes(
              bkio::decompress_buffer(to_bytes(frames), expected_size));
        });

  m.def(
      "train_dictionary",
      [](const std::vector<py::bytes>& samples, std::size_t capacity) {
        std::vector<bkio::Bytes> raw;
        raw.reserve(samples.size());
        for (const py::bytes& s : samples) raw.push_back(to_bytes(s));
        return from_bytes(bkio::train_dictionary(raw, capacity).blob);
      },
      py::arg("samples"), py::arg("capacity") = 16 * 1024);

  // end-to-end helpers over synthetic datasets
  m.def(
      "write_synthetic",
      [](const std::filesystem::path& path, const std::string& dataset,
         std::uint64_t events, std::uint64_t seed, bkio::CodecId codec,
         int level, bkio::PrecondId precond, bool cluster_policy,
         std::uint64_t policy_param) {
        bkio::Dataset ds = bkio::generate_dataset(
            bkio::dataset_from_string(dataset), events, seed);
        std::vector<bkio::ColumnCodecConfig> configs(
            ds.schema.size(),
            bkio::ColumnCodecConfig{{codec, level, nullptr}, precond});
        bkio::Writer writer(path, ds.schema, configs,
                            cluster_policy
                                ? bkio::FlushPolicy::only_at_cluster(policy_param)
                                : bkio::FlushPolicy::per_basket(policy_param));
        for (const bkio::EventBatch& batch : ds.batches) writer.append(batch);
        const bkio::FileFooter footer = writer.close();
        return py::make_tuple(footer.total_events, footer.directory.size());
      },
      py::arg("path"), py::arg("dataset") = "nanoaod", py::arg("events") = 1000,
      py::arg("seed") = 42, py::arg("codec") = bkio::CodecId::Zstd,
      py::arg("level") = 3, py::arg("precond") = bkio::PrecondId::None,
      py::arg("cluster_policy") = true, py::arg("policy_param") = 1000);

  py::class_<bkio::Reader>(m, "Reader")
      .def(py::init<const std::filesystem::path&>())
      .def("total_events",
           [](const bkio::Reader& r) { return r.footer().total_events; })
      .def("column_names",
           [](const bkio::Reader& r) {
             std::vector<std::string> names;
             for (const bkio::ColumnSchema& c : r.schema())
               names.push_back(c.name);
             return names;
           })
      .def("read_fixed",
           [](const bkio::Reader& r, const std::string& column,
              std::uint64_t begin, std::uint64_t count) {
             return from_bytes(
                 r.read_column(r.column_index(column), begin, count).fixed);
           })
      .def("read_variable",
           [](const bkio::Reader& r, const std::string& column,
              std::uint64_t begin, std::uint64_t count) {
             const bkio::ColumnChunk chunk =
                 r.read_column(r.column_index(column), begin, count);
             std::vector<py::bytes> out;
             out.reserve(chunk.var.size());
             for (const bkio::Bytes& ev : chunk.var) out.push_back(from_bytes(ev));
             return out;
           })
      .def("scan_all", [](const bkio::Reader& r) {
        const bkio::Reader::ScanStats stats = r.scan_all();
        return py::make_tuple(stats.total_bytes, stats.seconds);
      });
}

import os
import tempfile

import pytest

bkio = pytest.importorskip("_bkio")


def test_shuffle_roundtrip():
    data = bytes(range(16))
    shuffled = bkio.shuffle(data, 4)
    assert len(shuffled) == len(data)
    assert bkio.unshuffle(shuffled, 4) == data
    assert bkio.byte_stream_split(data, 4) == shuffled


def test_bitshuffle_roundtrip():
    data = bytes([0x01] * 8)
    planes = bkio.bitshuffle(data, 1)
    assert planes == bytes([0xFF] + [0x00] * 7)
    assert bkio.unbitshuffle(planes, 1) == data


def test_compression_roundtrip():
    payload = b"abc" * 1000
    framed = bkio.compress_buffer(payload, bkio.CodecId.Zstd, 3)
    assert len(framed) < len(payload)
    assert bkio.decompress_buffer(framed, len(payload)) == payload


def test_bad_stride_raises():
    with pytest.raises(bkio.BkioError):
        bkio.shuffle(b"abc", 2)


def test_dictionary_training():
    samples = [b"run=%06d event=%06d pt=%08d" % (i, i * 7, i * 13) * 20
               for i in range(128)]
    blob = bkio.train_dictionary(samples, 16 * 1024)
    assert 0 < len(blob) <= 16 * 1024


def test_write_read_container():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "smoke.bkio")
        total, baskets = bkio.write_synthetic(
            path, dataset="carray", events=500, seed=3,
            codec=bkio.CodecId.Lz4, level=1,
            precond=bkio.PrecondId.Shuffle, cluster_policy=True,
            policy_param=100)
        assert total == 500
        assert baskets == 5

        reader = bkio.Reader(path)
        assert reader.total_events() == 500
        assert reader.column_names() == ["arr"]
        events = reader.read_variable("arr", 0, 500)
        assert len(events) == 500
        assert all(len(ev) % 4 == 0 for ev in events)
        total_bytes, seconds = reader.scan_all()
        assert total_bytes > 0

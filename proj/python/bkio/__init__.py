from ._bkio import (  # noqa: F401
    BkioError,
    CodecId,
    PrecondId,
    Reader,
    bitshuffle,
    byte_stream_merge,
    byte_stream_split,
    compress_buffer,
    decompress_buffer,
    shuffle,
    train_dictionary,
    unbitshuffle,
    unshuffle,
    write_synthetic,
)

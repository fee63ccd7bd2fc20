#pragma once

#include <stdexcept>
#include <string>

namespace bkio {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BKIO_ERROR_TYPE(Name)            \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// model
BKIO_ERROR_TYPE(MalformedOffsets);

// precond
BKIO_ERROR_TYPE(BadStride);
BKIO_ERROR_TYPE(CountNotMultipleOf8);

// codec
BKIO_ERROR_TYPE(EmptyPayload);
BKIO_ERROR_TYPE(PayloadTooLarge);
BKIO_ERROR_TYPE(CodecFailure);
BKIO_ERROR_TYPE(UnknownTag);
BKIO_ERROR_TYPE(TruncatedFrame);
BKIO_ERROR_TYPE(SizeMismatch);
BKIO_ERROR_TYPE(TotalSizeMismatch);
BKIO_ERROR_TYPE(InsufficientSamples);
BKIO_ERROR_TYPE(TrainingFailure);

// writer / reader
BKIO_ERROR_TYPE(IoError);
BKIO_ERROR_TYPE(InvalidSettings);
BKIO_ERROR_TYPE(SchemaMismatch);
BKIO_ERROR_TYPE(BadMagic);
BKIO_ERROR_TYPE(CorruptFooter);
BKIO_ERROR_TYPE(DirectoryGap);

#undef BKIO_ERROR_TYPE

}  // namespace bkio

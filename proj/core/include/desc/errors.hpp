#pragma once

#include <stdexcept>

namespace desc {

// Base class for every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DESC_ERROR_TYPE(Name)          \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

// resource / file loading
DESC_ERROR_TYPE(MissingFile);
DESC_ERROR_TYPE(MalformedRow);
DESC_ERROR_TYPE(InconsistentDimension);
DESC_ERROR_TYPE(EmptyFile);

// tensor engine
DESC_ERROR_TYPE(ShapeMismatch);
DESC_ERROR_TYPE(NonScalarLoss);

// models
DESC_ERROR_TYPE(EmptySequence);
DESC_ERROR_TYPE(DimensionMismatch);
DESC_ERROR_TYPE(LabelOutOfRange);
DESC_ERROR_TYPE(EmptyDataset);

// features
DESC_ERROR_TYPE(EmptyCorpus);

// ensemble
DESC_ERROR_TYPE(OutOfRangeF1);
DESC_ERROR_TYPE(TooFewSamplesPerClass);

// evaluation
DESC_ERROR_TYPE(LengthMismatch);
DESC_ERROR_TYPE(EmptyInput);
DESC_ERROR_TYPE(SingleClassInput);
DESC_ERROR_TYPE(EmptyClass);

// dataset ingestion / artifacts
DESC_ERROR_TYPE(DuplicateId);
DESC_ERROR_TYPE(UnparseableLabel);
DESC_ERROR_TYPE(MissingArtifact);
DESC_ERROR_TYPE(VersionMismatch);
DESC_ERROR_TYPE(ConfigError);

#undef DESC_ERROR_TYPE

}  // namespace desc

#pragma once

#include <stdexcept>
#include <string>

namespace tripletnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural problems in an input file (bad header, wrong column count).
struct ParseError : Error {
  using Error::Error;
};

// Semantically invalid data (non-finite value, duplicate id, empty result).
struct DataError : Error {
  using Error::Error;
};

struct SamplerError : Error {
  using Error::Error;
};

struct TrainingError : Error {
  using Error::Error;
};

struct EvalError : Error {
  using Error::Error;
};

// Versioned artifact files (model, corpus) with a bad or unknown layout.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace tripletnet

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dctree {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operand shapes incompatible with the requested operation.
struct ShapeError : Error {
  using Error::Error;
};

// Malformed s-expression input; offset is the byte position in the text.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t offset_in)
      : Error(msg), offset(offset_in) {}
  std::size_t offset;
};

// Problems with dataset, embedding, or checkpoint files.
struct DataError : Error {
  using Error::Error;
};

// Invalid configuration or command-line usage.
struct ConfigError : Error {
  using Error::Error;
};

// A verification oracle cannot run (e.g. non-deterministic objective).
struct OracleError : Error {
  using Error::Error;
};

// Training diverged (non-finite loss); epoch is 1-based.
struct NumericError : Error {
  NumericError(const std::string& msg, int epoch_in)
      : Error(msg), epoch(epoch_in) {}
  int epoch;
};

}  // namespace dctree

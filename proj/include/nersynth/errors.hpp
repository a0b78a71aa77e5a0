#ifndef NERSYNTH_ERRORS_HPP
#define NERSYNTH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nersynth {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ": " + what),
        line(line) {}
  std::size_t line;
};

struct OffsetError : Error {
  using Error::Error;
};

struct SpanOutOfBounds : OffsetError {
  using OffsetError::OffsetError;
};

struct EmptyCover : Error {
  using Error::Error;
};

struct MaskOverlapsAnnotation : Error {
  using Error::Error;
};

struct UnknownCategory : Error {
  using Error::Error;
};

struct EmptyCorpus : Error {
  using Error::Error;
};

struct DegeneratePair : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct MisalignedSpan : Error {
  using Error::Error;
};

struct EmptyDataset : Error {
  using Error::Error;
};

struct DivergedLoss : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct LineCountMismatch : Error {
  using Error::Error;
};

}  // namespace nersynth

#endif

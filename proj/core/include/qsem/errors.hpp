#pragma once

#include <stdexcept>
#include <string>

namespace qsem {

// Broad error families. The CLI maps these onto exit codes.
enum class ErrorKind {
  kInvalidArgument,
  kDimension,
  kParse,
  kUnknownTerm,
  kIo,
  kVersion,
  kChecksum,
  kCorrupt,
  kNumeric,
  kDegenerate,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kDimension, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::kParse, what) {}
};

class UnknownTermError : public Error {
 public:
  explicit UnknownTermError(std::string term)
      : Error(ErrorKind::kUnknownTerm, "unknown term '" + term + "'"),
        term_(std::move(term)) {}

  [[nodiscard]] const std::string& term() const noexcept { return term_; }

 private:
  std::string term_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& what)
      : Error(ErrorKind::kVersion, what) {}
};

class ChecksumError : public Error {
 public:
  explicit ChecksumError(const std::string& what)
      : Error(ErrorKind::kChecksum, what) {}
};

class CorruptDataError : public Error {
 public:
  explicit CorruptDataError(const std::string& what)
      : Error(ErrorKind::kCorrupt, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

// Raised for the zero tensor, which has no meaningful separability ratio.
class DegenerateTensorError : public Error {
 public:
  explicit DegenerateTensorError(const std::string& what)
      : Error(ErrorKind::kDegenerate, what) {}
};

}  // namespace qsem

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mgram {

/// Broad failure category. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kUsage,     // bad arguments or options
  kData,      // malformed or inconsistent input data
  kIo,        // filesystem failures
  kInternal,  // a library invariant did not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what)
      : Error(ErrorKind::kInternal, what) {}
};

/// Syntax error in a query, PROSITE signature, or on-disk file; carries the
/// byte offset of the offending character.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : DataError(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace mgram

#pragma once

#include <stdexcept>
#include <string>

namespace atr {

/// Broad failure category. The CLI maps each category onto a process exit code.
enum class ErrorKind {
  Config,     // invalid configuration or parameters (exit 2)
  Data,       // malformed input, shape mismatch, out-of-range index (exit 3)
  Numerical,  // factorization failure, divergence, degenerate power (exit 4)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct GeometryError : Error {
  explicit GeometryError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Parse failure; carries the 1-based header line or the byte offset into the payload.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line, std::size_t offset)
      : Error(ErrorKind::Data, what + " (line " + std::to_string(line) + ", offset " +
                                   std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

struct MissingDataError : Error {
  explicit MissingDataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numerical: return 4;
  }
  return 1;
}

}  // namespace atr

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quip {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input record. line() is 1-based, 0 when not tied to a line.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& detail, const std::string& source = {})
      : Error((source.empty() ? "" : source + ": ") +
              (line ? "line " + std::to_string(line) + ": " + detail : detail)),
        line_(line),
        detail_(detail) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An external service (model, platform, encyclopedia) failed or was unreachable.
class ClientError : public Error {
 public:
  using Error::Error;
};

}  // namespace quip

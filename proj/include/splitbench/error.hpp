#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitbench {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `offset` is the byte offset where reading failed.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Structurally readable input that breaks a domain invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A reference between records that does not resolve.
class IntegrityError : public Error {
public:
  using Error::Error;
};

/// Bad argument or configuration value.
class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace splitbench

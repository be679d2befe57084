#pragma once

#include <stdexcept>
#include <string>

namespace hyperorbit {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixed-width integer arithmetic ran out of room. The caller asked for a
// ball too large for 64-bit entries.
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& msg) : Error(msg) {}
};

// Argument outside the domain of a function (pole, log of zero, bad range).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Corrupt, truncated or incompatible persisted data.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Enumeration found two distinct reduced words with the same matrix.
class NonFreeGroupError : public Error {
 public:
  explicit NonFreeGroupError(const std::string& msg) : Error(msg) {}
};

}  // namespace hyperorbit

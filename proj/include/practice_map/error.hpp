#pragma once

#include <stdexcept>
#include <string>

namespace practice_map {

// Bad configuration or parameters supplied by the caller (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data that cannot be used as a whole: missing columns, unreadable
// files, mismatched stage headers (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An API precondition was violated by the calling code, e.g. normalizing an
// already normalized vector or asking for the cosine of a zero vector.
class MisuseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace practice_map

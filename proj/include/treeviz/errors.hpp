#pragma once

#include <stdexcept>
#include <string>

namespace treeviz {

// Thrown for malformed inputs: bad CSV cells, schema violations,
// impossible split paths, out-of-range arguments.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for invalid user-facing options (flag values, formula syntax).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace treeviz

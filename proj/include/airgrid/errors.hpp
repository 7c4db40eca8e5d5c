#pragma once

#include <stdexcept>
#include <string>

namespace airgrid {

// Bad arguments, malformed input files, violated preconditions. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested (cell, timestamp) has no backing data in some family. CLI exit code 3.
class DataGapError : public std::runtime_error {
 public:
  explicit DataGapError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace airgrid

#pragma once

#include <stdexcept>
#include <string>

namespace emoter {

/// Problem with a config file or command-line usage (CLI exit status 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Problem with input data, model files or their contents (CLI exit status 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace emoter

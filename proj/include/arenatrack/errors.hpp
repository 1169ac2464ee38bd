#pragma once

#include <stdexcept>
#include <string>

namespace arenatrack {

// Bad parameter, malformed config/project file, invalid argument value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing, unreadable or unwritable file or directory.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Algorithmic failure on valid input (e.g. no arenas found).
class ProcessingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arenatrack

#pragma once

#include <stdexcept>
#include <string>

namespace ydde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Delay is not an integer multiple of the grid step.
class DelayNotAligned : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Non-finite state produced by a time-stepping scheme.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, long node) : Error(what), node_(node) {}
  long node() const { return node_; }

 private:
  long node_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ydde

#pragma once

#include <stdexcept>
#include <string>

namespace qtransport {

/// Invalid user-supplied configuration (bad partition, negative count, ...).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// An enumeration or sampling budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, long attempted_bound)
      : std::runtime_error(what + " (attempted bound " + std::to_string(attempted_bound) + ")"),
        attempted_bound_(attempted_bound) {}
  long attempted_bound() const { return attempted_bound_; }

 private:
  long attempted_bound_;
};

/// Request outside what the models define (barrier sampling, two barriers, ...).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qtransport

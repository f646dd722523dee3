#pragma once

#include <stdexcept>
#include <string>

namespace vlsc {

// A precondition on user-supplied input failed. `key()` names the offending
// parameter so front ends can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A configured resource ceiling (e.g. number of type classes) was exceeded.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A log-domain computation produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vlsc

#pragma once

#include <stdexcept>
#include <string>

namespace forumnet {

/// Input that violates a documented precondition (bad arguments, malformed
/// records, invalid configuration). The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while executing a stage on otherwise valid input. Exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forumnet

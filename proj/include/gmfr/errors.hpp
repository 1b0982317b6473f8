#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmfr {

// Malformed data, shape mismatches, out-of-domain arguments.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter combinations rejected before any iteration runs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A coefficient row (or template) with zero norm where a direction is needed.
class DegenerateRow : public InvalidInput {
 public:
  DegenerateRow(std::size_t index, const std::string& what)
      : InvalidInput(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Non-finite iterates or an unrecoverable numerical breakdown.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, long iteration = -1)
      : std::runtime_error(iteration >= 0 ? what + " at iteration " + std::to_string(iteration) : what),
        iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace gmfr

#pragma once

#include <stdexcept>
#include <string>

namespace ttlab {

// Contract violations (bad arguments, stepping a finished episode, ...).
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite losses/gradients and other numeric breakdowns.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable, truncated or incompatible checkpoint/trace files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Layout rejection sampling ran out of retries.
class SamplingError : public std::runtime_error {
 public:
  explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ttlab

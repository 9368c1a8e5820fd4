#pragma once

#include <stdexcept>
#include <string>

namespace resume_snn {

/// Invalid or inconsistent configuration (bad ranges, size mismatches, unknown keys).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling ran out of attempts; the parameters are likely infeasible.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (e.g. spike outside the kernel window).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed query against recorded data, e.g. an epoch window outside the run.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace resume_snn

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace nctefa {

/// Base of every error raised by the library. `exit_code()` is the process
/// status the CLI returns when the error escapes a subcommand.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

/// Violated precondition or invalid configuration.
class ContractError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Anything that goes wrong while reading a dataset.
class IngestError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Malformed JSON/CSV.
class ParseError : public IngestError {
 public:
  using IngestError::IngestError;
};

/// Well-formed input whose content is inconsistent (missing labels, empty graphs).
class IntegrityError : public IngestError {
 public:
  using IngestError::IngestError;
};

class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Raised when a Gramian (or a quantity derived from it) is no longer finite.
class NumericOverflowError : public NumericError {
 public:
  NumericOverflowError(const std::string& what, std::optional<std::int64_t> graph_id,
                       double spectral_bound)
      : NumericError(what), graph_id_(graph_id), spectral_bound_(spectral_bound) {}

  std::optional<std::int64_t> graph_id() const noexcept { return graph_id_; }
  double spectral_bound() const noexcept { return spectral_bound_; }

 private:
  std::optional<std::int64_t> graph_id_;
  double spectral_bound_;
};

/// Input for which a metric is mathematically undefined.
class DegenerateInputError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace nctefa

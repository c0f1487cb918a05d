#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phmm {

/// Raised when an argument violates a model or type invariant
/// (negative count, rate below the floor, stay probability outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised while turning external data into an ObservationSeries.
/// `line()` is the 1-based input line (or 1-based element index for
/// timestamp lists); 0 when the error is not tied to a single row.
class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace phmm

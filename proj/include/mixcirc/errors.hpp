#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixcirc {

// Base error for everything this library throws on purpose. `kind()` is a
// stable machine-readable tag; the what() string is for humans.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Invalid argument or state detected before any fitting starts.
struct DomainError : Error {
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

// Resultant length of an angle set is (numerically) zero, so no mean
// direction exists.
struct DegenerateDirectionError : Error {
  explicit DegenerateDirectionError(const std::string& message)
      : Error("degenerate_direction", message) {}
};

// Design matrix problems: constant columns, rank deficiency, shape mismatch.
struct DesignError : Error {
  explicit DesignError(const std::string& message) : Error("design", message) {}
};

// A mixture component lost essentially all of its posterior mass.
struct EmptyComponentError : Error {
  EmptyComponentError(int component, const std::string& message)
      : Error("empty_component", message), component(component) {}

  int component = -1;
};

// Every start of a multi-start fit failed; `causes` keeps one line per start.
struct FittingFailedError : Error {
  FittingFailedError(const std::string& message, std::vector<std::string> causes)
      : Error("fitting_failed", message), causes(std::move(causes)) {}

  std::vector<std::string> causes;
};

// Too many bootstrap replicates failed for the summaries to mean anything.
struct BootstrapUnreliableError : Error {
  explicit BootstrapUnreliableError(const std::string& message)
      : Error("bootstrap_unreliable", message) {}
};

// A statistic's denominator vanished (zero variance, zero sine residuals).
struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& message) : Error("degeneracy", message) {}
};

// File access problems.
struct IoError : Error {
  explicit IoError(const std::string& message) : Error("io", message) {}
};

// Malformed file content; carries the 1-based row where parsing stopped.
struct ParseError : Error {
  ParseError(const std::string& message, long row = -1)
      : Error("parse", message), row(row) {}

  long row = -1;
};

}  // namespace mixcirc

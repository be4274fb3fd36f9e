#pragma once
#include <stdexcept>
#include <string>

namespace borelsum {

// Error taxonomy. Every library error derives from error and carries a short
// machine-readable kind string, so the CLI can map failures onto exit codes
// (validation-type -> 2, numeric-type -> 3) and emit structured diagnostics.
class error : public std::runtime_error {
public:
  error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

// Mismatched truncation parameters, bad degrees, empty factor lists, ...
struct parameter_error : error {
  explicit parameter_error(const std::string& msg) : error("parameter", msg) {}
};

// Input outside the mathematical domain of the operation (nonzero constant
// term fed to the Borel transform, kernel non-decaying, xi off the sector).
struct domain_error : error {
  explicit domain_error(const std::string& msg) : error("domain", msg) {}
};

// Quadrature or iteration failed to reach the requested tolerance; carries
// the best error estimate achieved.
struct numeric_error : error {
  numeric_error(const std::string& msg, double estimate_)
      : error("numeric", msg), estimate(estimate_) {}
  double estimate;
};

// Re-expansion or recursion needs a higher truncation order than available.
struct truncation_error : error {
  truncation_error(const std::string& msg, int required_order_)
      : error("truncation", msg), required_order(required_order_) {}
  int required_order;
};

// Singular Pade system; lower degrees may succeed.
struct degeneracy_error : error {
  explicit degeneracy_error(const std::string& msg) : error("degeneracy", msg) {}
};

// File / config / problem-description validation.
struct validation_error : error {
  explicit validation_error(const std::string& msg) : error("validation", msg) {}
};

// A summation ray passes too close to a Borel-plane pole.
struct direction_rejected : error {
  direction_rejected(const std::string& msg, double pole_re, double pole_im)
      : error("direction-rejected", msg), pole_real(pole_re), pole_imag(pole_im) {}
  double pole_real, pole_imag;
};

// "This cannot happen" class: broken internal invariant, i.e. a bug.
struct internal_error : error {
  explicit internal_error(const std::string& msg) : error("internal", msg) {}
};

struct degenerate_input_error : error {
  explicit degenerate_input_error(const std::string& msg) : error("degenerate-input", msg) {}
};

}  // namespace borelsum

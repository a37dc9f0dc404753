#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavegauge {

/// Shortest-form rendering of a double for messages (%.6g).
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Base class of every error thrown by the library. The CLI maps the
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value (exit code 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to produce a trustworthy result (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Default inequality tolerances: absolute plus relative slack.
struct Tolerance {
  double abs = 1e-8;
  double rel = 1e-6;

  // lhs <= rhs up to slack
  [[nodiscard]] bool leq(double lhs, double rhs) const {
    return lhs <= rhs + abs + rel * std::abs(rhs);
  }
};

struct Check {
  std::string name;
  bool passed = true;
  std::optional<double> witness;  // violating point, when there is one
  std::string detail;
};

/// Named pass/fail checks. Failures are data, not errors.
class ValidationReport {
 public:
  void add(Check c) { checks_.push_back(std::move(c)); }

  void add(std::string name, bool passed, std::optional<double> witness = std::nullopt,
           std::string detail = {}) {
    checks_.push_back(Check{std::move(name), passed, witness, std::move(detail)});
  }

  void merge(const ValidationReport& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  }

  [[nodiscard]] bool all_passed() const {
    for (const auto& c : checks_)
      if (!c.passed) return false;
    return true;
  }

  [[nodiscard]] const Check* find(const std::string& name) const {
    for (const auto& c : checks_)
      if (c.name == name) return &c;
    return nullptr;
  }

  [[nodiscard]] const std::vector<Check>& checks() const { return checks_; }

 private:
  std::vector<Check> checks_;
};

}  // namespace wavegauge

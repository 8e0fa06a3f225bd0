#pragma once

#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

namespace seaice {

inline std::string format_sci(double v, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << std::scientific << v;
  return os.str();
}

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field shapes that do not match the owning grid.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented domain of an operation (e.g. a non-positive shift).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Ice state outside the admissible set (thickness or compactness bounds).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inner solver breakdown or non-convergence.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Invalid configuration; carries one message per offending field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

/// Snapshot files that cannot be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace seaice

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mossp {

using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A violated parameter inequality. `inequality()` names it, e.g. "μ₀ ≤ 1/(4ρ₀)".
class ScheduleError : public Error {
 public:
  ScheduleError(std::string inequality, const std::string& detail)
      : Error(inequality + " violated: " + detail), inequality_(std::move(inequality)) {}
  const std::string& inequality() const { return inequality_; }

 private:
  std::string inequality_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ": line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

inline void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size())
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
}

}  // namespace mossp

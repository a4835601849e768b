#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

class CoefficientError : public Error {
public:
  using Error::Error;
};

/// Expression syntax error; `offset` is the byte offset into the source.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class MeshError : public Error {
public:
  using Error::Error;
};

class AssemblyError : public Error {
public:
  using Error::Error;
};

/// Eigensolver failure. Carries the best residuals reached before giving up.
class SolverError : public Error {
public:
  explicit SolverError(const std::string& what, std::vector<double> best_residuals = {})
      : Error(what), best_residuals_(std::move(best_residuals)) {}
  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

private:
  std::vector<double> best_residuals_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace cylspec

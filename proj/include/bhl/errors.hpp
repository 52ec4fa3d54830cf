#pragma once

#include <stdexcept>
#include <string>

namespace bhl {

/// Module that raised an error. The numeric value doubles as the CLI exit code.
enum class Module : int {
  geometry = 2,
  solver = 3,
  exponents = 4,
  barriers = 5,
  verifier = 6,
  singular = 7,
  cli = 8,
};

std::string to_string(Module m);

class Error : public std::runtime_error {
 public:
  Error(Module module, std::string kind, const std::string& msg)
      : std::runtime_error(msg), module_(module), kind_(std::move(kind)) {}

  Module module() const noexcept { return module_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  Module module_;
  std::string kind_;
};

class GeometryError : public Error {
 public:
  GeometryError(std::string kind, const std::string& msg)
      : Error(Module::geometry, std::move(kind), msg) {}
};

class SolverError : public Error {
 public:
  SolverError(std::string kind, const std::string& msg, double last_residual = -1.0)
      : Error(Module::solver, std::move(kind), msg), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class ExponentError : public Error {
 public:
  ExponentError(std::string kind, const std::string& msg)
      : Error(Module::exponents, std::move(kind), msg) {}
};

class BarrierError : public Error {
 public:
  BarrierError(std::string kind, const std::string& msg)
      : Error(Module::barriers, std::move(kind), msg) {}
};

class VerifierError : public Error {
 public:
  VerifierError(std::string kind, const std::string& msg)
      : Error(Module::verifier, std::move(kind), msg) {}
};

class SingularError : public Error {
 public:
  SingularError(std::string kind, const std::string& msg)
      : Error(Module::singular, std::move(kind), msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(Module::cli, "config", msg) {}
};

}  // namespace bhl

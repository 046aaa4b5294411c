#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scenforge {

// Process exit codes used by the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitUnsatisfiable = 3,
  kExitInternal = 4,
};

class Error : public std::runtime_error {
public:
  Error(std::string message, int exit_code)
      : std::runtime_error(std::move(message)), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

private:
  int exit_code_;
};

// Malformed line in one of the line-oriented specification dialects.
class SyntaxError : public Error {
public:
  SyntaxError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message,
              kExitValidation),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class UnknownReference : public Error {
public:
  UnknownReference(std::size_t line, const std::string& name,
                   const std::string& context)
      : Error("line " + std::to_string(line) + ": unknown " + context + " '" +
                  name + "'",
              kExitValidation),
        line_(line),
        name_(name) {}
  std::size_t line() const { return line_; }
  const std::string& name() const { return name_; }

private:
  std::size_t line_;
  std::string name_;
};

class DuplicateDeclaration : public Error {
public:
  DuplicateDeclaration(std::size_t line, const std::string& name)
      : Error("line " + std::to_string(line) + ": duplicate declaration '" +
                  name + "'",
              kExitValidation),
        line_(line),
        name_(name) {}
  std::size_t line() const { return line_; }
  const std::string& name() const { return name_; }

private:
  std::size_t line_;
  std::string name_;
};

// No model exists within the requested bounds. When raising the connector
// bound would admit a model, bound_too_small() is set as a hint.
class Unsatisfiable : public Error {
public:
  explicit Unsatisfiable(std::string message, bool bound_too_small = false)
      : Error(std::move(message), kExitUnsatisfiable),
        bound_too_small_(bound_too_small) {}
  bool bound_too_small() const { return bound_too_small_; }

private:
  bool bound_too_small_;
};

class ConfigError : public Error {
public:
  explicit ConfigError(std::string message)
      : Error(std::move(message), kExitValidation) {}
};

class SchemaError : public Error {
public:
  SchemaError(std::string path, std::string message)
      : Error("schema error at " + path + ": " + message, kExitValidation),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

class PolicyError : public Error {
public:
  explicit PolicyError(std::string message)
      : Error(std::move(message), kExitInternal) {}
};

class InternalError : public Error {
public:
  explicit InternalError(std::string message)
      : Error(std::move(message), kExitInternal) {}
};

namespace detail {
inline void require(bool cond, const char* what) {
  if (!cond) throw InternalError(std::string("invariant violated: ") + what);
}
} // namespace detail

} // namespace scenforge

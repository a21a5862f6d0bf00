#pragma once

#include <stdexcept>
#include <string>

namespace cloak {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind { Config, Mesh, Solver, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return {ErrorKind::Config, what}; }
inline Error mesh_error(const std::string& what) { return {ErrorKind::Mesh, what}; }
inline Error solver_error(const std::string& what) { return {ErrorKind::Solver, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::Io, what}; }

}  // namespace cloak

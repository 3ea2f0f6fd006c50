#pragma once

#include <stdexcept>
#include <string>

namespace strichartz {

enum class ErrorCode {
  Configuration,
  Domain,
  NumericalDegeneracy,
  ProjectorAnnihilated,
  Resource,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Configuration, what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& what) : Error(ErrorCode::NumericalDegeneracy, what) {}
};

/// The pre-projector mapped a nonzero input to zero.
struct AnnihilatedError : Error {
  explicit AnnihilatedError(const std::string& what) : Error(ErrorCode::ProjectorAnnihilated, what) {}
};

struct ResourceError : Error {
  explicit ResourceError(const std::string& what) : Error(ErrorCode::Resource, what) {}
};

/// Process exit code used by the command line tool for each error class.
inline int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Configuration:
    case ErrorCode::Domain:
      return 1;
    case ErrorCode::NumericalDegeneracy:
    case ErrorCode::ProjectorAnnihilated:
      return 2;
    case ErrorCode::Resource:
      return 3;
  }
  return 1;
}

}  // namespace strichartz

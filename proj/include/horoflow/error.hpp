#pragma once

#include <stdexcept>
#include <string>

namespace horo {

enum class ErrorCode {
  Validation = 2,  // malformed input or violated certificate
  Budget = 3,      // numerical budget exhausted (step caps, orbit sizes)
  Domain = 4,      // operation undefined for this input
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorCode::Validation, w) {}
};
struct BudgetError : Error {
  explicit BudgetError(const std::string& w) : Error(ErrorCode::Budget, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::Domain, w) {}
};

}  // namespace horo

#ifndef SRTE_CORE_ERROR_H
#define SRTE_CORE_ERROR_H

#include <stdexcept>
#include <string>

namespace srte {

// Mirrors the srte_status codes of the C API (see include/srte/srte.h).
enum class ErrorCode {
  kParse = 1,
  kInvalidInstance = 2,
  kInvalidArgument = 3,
  kCommandNotFound = 4,
  kSolverFailed = 5,
  kUnparseableOutput = 6,
  kInfeasible = 7,
  kSearchLimit = 8,
  kIo = 9,
  kNonUniqueAssignment = 10,
  kMissingVariable = 11,
  kDemandMismatch = 12,
  kSprTrivial = 13,
  kNoSolution = 14,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace srte

#endif  // SRTE_CORE_ERROR_H

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phlab {

enum class ErrorCode {
  NotUnimodular,
  NotHyperbolic,
  OverflowBudget,
  NoSolutionInBound,
  DeltaTooLarge,
  NotContracting,
  RootFindFail,
  PreconditionViolated,
  ThresholdNotMet,
  BudgetExhausted,
  RangeOutsideNeighborhood,
  DominationViolated,
  InconclusiveSign,
  NotSameLeaf,
  NoConvergence,
  DegenerateGeometry,
  NotMostlyContracting,
  HypothesisUnmet,
  CandidateExhausted,
  NoPlissTime,
  IntervalsNotSeparated,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Throws Error(code, msg) when cond is false.
inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace phlab

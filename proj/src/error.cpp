#include "phlab/error.hpp"

namespace phlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::OverflowBudget: return "OverflowBudget";
    case ErrorCode::NoSolutionInBound: return "NoSolutionInBound";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::NotContracting: return "NotContracting";
    case ErrorCode::RootFindFail: return "RootFindFail";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ThresholdNotMet: return "ThresholdNotMet";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::RangeOutsideNeighborhood: return "RangeOutsideNeighborhood";
    case ErrorCode::DominationViolated: return "DominationViolated";
    case ErrorCode::InconclusiveSign: return "InconclusiveSign";
    case ErrorCode::NotSameLeaf: return "NotSameLeaf";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NotMostlyContracting: return "NotMostlyContracting";
    case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
    case ErrorCode::CandidateExhausted: return "CandidateExhausted";
    case ErrorCode::NoPlissTime: return "NoPlissTime";
    case ErrorCode::IntervalsNotSeparated: return "IntervalsNotSeparated";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace phlab

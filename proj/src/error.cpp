#include "qnil/error.hpp"

namespace qnil {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoPositiveCoordinate: return "NoPositiveCoordinate";
    case ErrorCode::SupportOverflow: return "SupportOverflow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroPatternViolation: return "ZeroPatternViolation";
    case ErrorCode::BadWordIndex: return "BadWordIndex";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidSeed: return "InvalidSeed";
    case ErrorCode::ConstantTermPresent: return "ConstantTermPresent";
    case ErrorCode::HypothesisRefuted: return "HypothesisRefuted";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownOperatorKind: return "UnknownOperatorKind";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace qnil

#include "nsc/error.hpp"

namespace nsc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotSemiDefinite: return "NotSemiDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RestitutionOutOfRange: return "RestitutionOutOfRange";
    case ErrorCode::InvalidForcing: return "InvalidForcing";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InconsistentSpec: return "InconsistentSpec";
    case ErrorCode::LcpFailure: return "LcpFailure";
    case ErrorCode::SingularIterationMatrix: return "SingularIterationMatrix";
    case ErrorCode::MissingHistory: return "MissingHistory";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotAvailable: return "NotAvailable";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void fail(ErrorCode code, std::string field, const std::string& message) {
  std::string text{to_string(code)};
  if (!field.empty()) {
    text += " [" + field + "]";
  }
  text += ": " + message;
  throw Error(code, std::move(field), text);
}

}  // namespace nsc

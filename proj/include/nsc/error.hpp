#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsc {

enum class ErrorCode {
  NonSymmetric,
  NotPositiveDefinite,
  NotSemiDefinite,
  DimensionMismatch,
  RestitutionOutOfRange,
  InvalidForcing,
  InvalidSpec,
  InconsistentSpec,
  LcpFailure,
  SingularIterationMatrix,
  MissingHistory,
  NotApplicable,
  NotAvailable,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as an Error carrying a code and, where
// one exists, the name of the offending field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& message)
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

[[noreturn]] void fail(ErrorCode code, std::string field, const std::string& message);

}  // namespace nsc

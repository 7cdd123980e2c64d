#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace charvar {

enum class ErrorCode {
  NotPrime,
  DegreeZero,
  FieldTooLarge,
  NoRootOfUnity,
  EnumerationTooLarge,
  SingularTarget,
  TableMismatch,
  NonIntegralQuotient,
  DivisionByZero,
  InsufficientSamples,
  HoldoutMismatch,
  NonIntegerCoefficients,
  TowerTooShallow,
  NonzeroConstantTerm,
  BadConstantTerm,
  MissingCounts,
  MalformedMap,
  GenusZero,
  NoGrading,
  CutMeetsLocalization,
  AuditFailure,
  NoCut,
  IdentityFailure,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::DegreeZero: return "DegreeZero";
    case ErrorCode::FieldTooLarge: return "FieldTooLarge";
    case ErrorCode::NoRootOfUnity: return "NoRootOfUnity";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::SingularTarget: return "SingularTarget";
    case ErrorCode::TableMismatch: return "TableMismatch";
    case ErrorCode::NonIntegralQuotient: return "NonIntegralQuotient";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::HoldoutMismatch: return "HoldoutMismatch";
    case ErrorCode::NonIntegerCoefficients: return "NonIntegerCoefficients";
    case ErrorCode::TowerTooShallow: return "TowerTooShallow";
    case ErrorCode::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case ErrorCode::BadConstantTerm: return "BadConstantTerm";
    case ErrorCode::MissingCounts: return "MissingCounts";
    case ErrorCode::MalformedMap: return "MalformedMap";
    case ErrorCode::GenusZero: return "GenusZero";
    case ErrorCode::NoGrading: return "NoGrading";
    case ErrorCode::CutMeetsLocalization: return "CutMeetsLocalization";
    case ErrorCode::AuditFailure: return "AuditFailure";
    case ErrorCode::NoCut: return "NoCut";
    case ErrorCode::IdentityFailure: return "IdentityFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Every failure in the library is reported through this one exception type;
// callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace charvar

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace delphinet {

/// Every failure the library reports carries one of these codes. The
/// service maps them onto HTTP status + reason, the CLI onto exit codes.
enum class ErrorCode {
  // network model
  DuplicateName,
  InvalidStates,
  UnknownVariable,
  UnknownState,
  CycleError,
  SelfLoop,
  DuplicateArrow,
  UnknownArrow,
  OutOfRange,
  RowOverflow,
  RowSumError,
  InvalidDocument,
  // inference
  ImpossibleEvidence,
  NetworkTooLarge,
  ResourceLimit,
  EvidenceAlreadyPresent,
  // verbal probabilities
  ParseError,
  UnknownDescriptor,
  // scenarios
  NameCollision,
  VersionMismatch,
  UndeletableScenario,
  UnknownScenario,
  InvalidEvidence,
  // workflow / collaboration / reporting
  EmptyContent,
  RoleError,
  GateClosed,
  IncompatibleSelection,
  InvalidPayload,
  UnknownMember,
  UnknownGroup,
  UnknownProblem,
  UnknownReport,
  FacilitatorSingularity,
  DuplicatePseudonym,
  AnalystToAnalyst,
  Frozen,
  VersionConflict,
  StaleExplanation,
  NoRatedReports,
  AlreadySubmitted,
  NotShared,
  // service
  Unauthenticated,
  CorruptLog,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidStates: return "InvalidStates";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateArrow: return "DuplicateArrow";
    case ErrorCode::UnknownArrow: return "UnknownArrow";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RowOverflow: return "RowOverflow";
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::ImpossibleEvidence: return "ImpossibleEvidence";
    case ErrorCode::NetworkTooLarge: return "NetworkTooLarge";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::EvidenceAlreadyPresent: return "EvidenceAlreadyPresent";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownDescriptor: return "UnknownDescriptor";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::UndeletableScenario: return "UndeletableScenario";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::InvalidEvidence: return "InvalidEvidence";
    case ErrorCode::EmptyContent: return "EmptyContent";
    case ErrorCode::RoleError: return "RoleError";
    case ErrorCode::GateClosed: return "GateClosed";
    case ErrorCode::IncompatibleSelection: return "IncompatibleSelection";
    case ErrorCode::InvalidPayload: return "InvalidPayload";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::UnknownReport: return "UnknownReport";
    case ErrorCode::FacilitatorSingularity: return "FacilitatorSingularity";
    case ErrorCode::DuplicatePseudonym: return "DuplicatePseudonym";
    case ErrorCode::AnalystToAnalyst: return "AnalystToAnalyst";
    case ErrorCode::Frozen: return "Frozen";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::StaleExplanation: return "StaleExplanation";
    case ErrorCode::NoRatedReports: return "NoRatedReports";
    case ErrorCode::AlreadySubmitted: return "AlreadySubmitted";
    case ErrorCode::NotShared: return "NotShared";
    case ErrorCode::Unauthenticated: return "Unauthenticated";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  /// `detail` carries structured context: the cycle path for CycleError,
  /// the gate reason for GateClosed, the character offset for ParseError.
  Error(ErrorCode code, const std::string& message, std::vector<std::string> detail)
      : Error(code, message) {
    detail_ = std::move(detail);
  }

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::vector<std::string> detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace delphinet

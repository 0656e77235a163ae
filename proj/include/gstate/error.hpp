#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gstate {

enum class ErrorCode {
  EmptyRegion,
  GridMismatch,
  DegenerateHeight,
  OutsideDomain,
  CrossSectionTooThin,
  EigSolveFailed,
  EmptyDomain,
  ResolutionTooCoarse,
  LinearSolveFailed,
  OracleTooLarge,
  LevelEmpty,
  AtDomainEdge,
  SweepTooSmall,
  InvalidDomain,
  InvalidConfig,
  Io,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateHeight: return "DegenerateHeight";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::CrossSectionTooThin: return "CrossSectionTooThin";
    case ErrorCode::EigSolveFailed: return "EigSolveFailed";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::LinearSolveFailed: return "LinearSolveFailed";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::LevelEmpty: return "LevelEmpty";
    case ErrorCode::AtDomainEdge: return "AtDomainEdge";
    case ErrorCode::SweepTooSmall: return "SweepTooSmall";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception; `code()` is the
/// stable identifier written into error reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gstate

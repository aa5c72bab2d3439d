#pragma once

#include <stdexcept>
#include <string>

namespace tlecascade {

enum class ErrorCode {
  // ingest
  ChecksumMismatch,
  FieldParse,
  LineLengthMismatch,
  CatalogMismatch,
  DayOutOfRange,
  Io,
  EmptyArchive,
  // dynamics
  NonPositive,
  Hyperbolic,
  Degenerate,
  NoConvergence,
  BelowModelFloor,
  // features / windowing
  EpochOrder,
  SatelliteMismatch,
  DegenerateFeature,
  // filter
  NotPositiveDefinite,
  SingularInnovationCovariance,
  ReentryDuringPredict,
  AllModesFailed,
  // cascade
  NonPositiveSigma,
  LengthMismatch,
  UndefinedRatio,
  // cli / config
  ConfigParse,
};

constexpr const char* to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::FieldParse: return "FieldParse";
    case ErrorCode::LineLengthMismatch: return "LineLengthMismatch";
    case ErrorCode::CatalogMismatch: return "CatalogMismatch";
    case ErrorCode::DayOutOfRange: return "DayOutOfRange";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyArchive: return "EmptyArchive";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::Hyperbolic: return "Hyperbolic";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BelowModelFloor: return "BelowModelFloor";
    case ErrorCode::EpochOrder: return "EpochOrder";
    case ErrorCode::SatelliteMismatch: return "SatelliteMismatch";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularInnovationCovariance: return "SingularInnovationCovariance";
    case ErrorCode::ReentryDuringPredict: return "ReentryDuringPredict";
    case ErrorCode::AllModesFailed: return "AllModesFailed";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UndefinedRatio: return "UndefinedRatio";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

/// Single exception type for the whole library; the code tells callers which
/// contract was violated without a taxonomy of exception classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tlecascade

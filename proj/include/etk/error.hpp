#pragma once

#include <stdexcept>
#include <string>

namespace etk {

// Numeric values are shared with the C API (see etk.h).
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 10,
  ParseError = 11,
  OutOfValidity = 12,
  TailTooClose = 13,
  DegenerateDomain = 14,
  WitnessTooClose = 15,
  SeparationViolated = 16,
  BelowThreshold = 17,
  HypothesisFailed = 18,
  NotSimplyConnected = 19,
  Disconnected = 20,
  OnTarget = 21,
  NeedsRefinement = 22,
  BoundaryHit = 23,
  RefinementBudgetExceeded = 24,
  MarginTooSmall = 25,
  Inconclusive = 26,
  CertificationFailed = 27,
  NotEnoughPreimages = 28,
  SubdivisionBudgetExceeded = 29,
  EnumerationBudgetExceeded = 30,
  PreconditionViolated = 31,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace etk

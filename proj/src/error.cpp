#include "etk/error.hpp"

namespace etk {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OutOfValidity: return "OutOfValidity";
    case ErrorCode::TailTooClose: return "TailTooClose";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::WitnessTooClose: return "WitnessTooClose";
    case ErrorCode::SeparationViolated: return "SeparationViolated";
    case ErrorCode::BelowThreshold: return "BelowThreshold";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::NotSimplyConnected: return "NotSimplyConnected";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::OnTarget: return "OnTarget";
    case ErrorCode::NeedsRefinement: return "NeedsRefinement";
    case ErrorCode::BoundaryHit: return "BoundaryHit";
    case ErrorCode::RefinementBudgetExceeded: return "RefinementBudgetExceeded";
    case ErrorCode::MarginTooSmall: return "MarginTooSmall";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::CertificationFailed: return "CertificationFailed";
    case ErrorCode::NotEnoughPreimages: return "NotEnoughPreimages";
    case ErrorCode::SubdivisionBudgetExceeded: return "SubdivisionBudgetExceeded";
    case ErrorCode::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
  }
  return "Unknown";
}

}  // namespace etk

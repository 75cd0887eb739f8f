#include "resonance/error.hpp"

namespace resonance {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonSymmetricDot: return "NonSymmetricDot";
    case ErrorCode::BadSiteIndex: return "BadSiteIndex";
    case ErrorCode::NoLeads: return "NoLeads";
    case ErrorCode::BadLead: return "BadLead";
    case ErrorCode::ZeroLambda: return "ZeroLambda";
    case ErrorCode::BranchPoint: return "BranchPoint";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::UnitLambdaSquared: return "UnitLambdaSquared";
    case ErrorCode::IncompleteSpectrum: return "IncompleteSpectrum";
    case ErrorCode::SingularAtPole: return "SingularAtPole";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::BandEdge: return "BandEdge";
    case ErrorCode::UnitCircleLambda: return "UnitCircleLambda";
    case ErrorCode::QuadratureFail: return "QuadratureFail";
    case ErrorCode::BandEdgeK: return "BandEdgeK";
    case ErrorCode::ContourPoleConflict: return "ContourPoleConflict";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::IllConditionedPolynomial: return "IllConditionedPolynomial";
    }
    return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::NonSymmetricDot:
    case ErrorCode::BadSiteIndex:
    case ErrorCode::NoLeads:
    case ErrorCode::BadLead:
    case ErrorCode::ZeroLambda:
    case ErrorCode::BranchPoint:
    case ErrorCode::UnitLambdaSquared:
    case ErrorCode::BandEdge:
    case ErrorCode::UnitCircleLambda:
    case ErrorCode::BandEdgeK:
    case ErrorCode::HorizonExceeded:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

}  // namespace resonance

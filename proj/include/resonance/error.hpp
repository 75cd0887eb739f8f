#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resonance {

enum class ErrorCode {
    // input / model
    InvalidInput,
    NonSymmetricDot,
    BadSiteIndex,
    NoLeads,
    BadLead,
    // dispersion and spectral
    ZeroLambda,
    BranchPoint,
    DegenerateSpectrum,
    SolverFailure,
    UnitLambdaSquared,
    IncompleteSpectrum,
    // Green's functions
    SingularAtPole,
    PoleHit,
    BandEdge,
    UnitCircleLambda,
    // time domain
    QuadratureFail,
    BandEdgeK,
    ContourPoleConflict,
    // oracle
    HorizonExceeded,
    IllConditionedPolynomial,
};

std::string_view to_string(ErrorCode code) noexcept;

// Errors caused by what the caller supplied (exit code 2 in the CLI).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace resonance

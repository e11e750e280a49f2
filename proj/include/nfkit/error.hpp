#pragma once

#include <stdexcept>
#include <string>

namespace nfkit {

enum class ErrorCode {
    DimensionMismatch,
    ConstantTermNonzero,
    SingularLinearPart,
    NotAUnit,
    PerfectSquareRequired,
    NotDivisible,
    LogTangencyViolated,
    NotClosed,
    OrderTooLow,
    DivisorNotPreserved,
    EigenvaluesNotInField,
    WeightViolation,
    DegenerateSymplecticForm,
    DegenerateFold,
    DegenerateSingularity,
    PrimitiveNotDivisible,
    NotInvariant,
    QuasiHomogeneityViolated,
    DegenerateLogSymplectic,
    PreservationFailed,
    StructuralPropertyViolated,
    CommutationFailed,
    TangentialStructureBroken,
    NotPrimitiveShape,
    HypothesisFailed,
    NotInNormalForm,
    NotSemiInvariant,
    ParseError,
    ArityError,
    UnknownVariable,
    Internal,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what_arg)
        : std::runtime_error(std::string(error_name(code)) + ": " + what_arg), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

} // namespace nfkit

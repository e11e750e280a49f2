#include "nfkit/error.hpp"

namespace nfkit {

const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConstantTermNonzero: return "ConstantTermNonzero";
    case ErrorCode::SingularLinearPart: return "SingularLinearPart";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::PerfectSquareRequired: return "PerfectSquareRequired";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::LogTangencyViolated: return "LogTangencyViolated";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::OrderTooLow: return "OrderTooLow";
    case ErrorCode::DivisorNotPreserved: return "DivisorNotPreserved";
    case ErrorCode::EigenvaluesNotInField: return "EigenvaluesNotInField";
    case ErrorCode::WeightViolation: return "WeightViolation";
    case ErrorCode::DegenerateSymplecticForm: return "DegenerateSymplecticForm";
    case ErrorCode::DegenerateFold: return "DegenerateFold";
    case ErrorCode::DegenerateSingularity: return "DegenerateSingularity";
    case ErrorCode::PrimitiveNotDivisible: return "PrimitiveNotDivisible";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::QuasiHomogeneityViolated: return "QuasiHomogeneityViolated";
    case ErrorCode::DegenerateLogSymplectic: return "DegenerateLogSymplectic";
    case ErrorCode::PreservationFailed: return "PreservationFailed";
    case ErrorCode::StructuralPropertyViolated: return "StructuralPropertyViolated";
    case ErrorCode::CommutationFailed: return "CommutationFailed";
    case ErrorCode::TangentialStructureBroken: return "TangentialStructureBroken";
    case ErrorCode::NotPrimitiveShape: return "NotPrimitiveShape";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::NotInNormalForm: return "NotInNormalForm";
    case ErrorCode::NotSemiInvariant: return "NotSemiInvariant";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace nfkit

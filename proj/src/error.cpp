#include "gauss_counter/error.hpp"

namespace gauss_counter {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Unphysical: return "Unphysical";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::LambdaPrimeOutOfRange: return "LambdaPrimeOutOfRange";
    case ErrorCode::OddLength: return "OddLength";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ZeroP0: return "ZeroP0";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::NoKernelFound: return "NoKernelFound";
    case ErrorCode::RankAmbiguity: return "RankAmbiguity";
    case ErrorCode::ComplexRoot: return "ComplexRoot";
    case ErrorCode::RootOutOfRange: return "RootOutOfRange";
    case ErrorCode::InvalidRootMultiplicity: return "InvalidRootMultiplicity";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::MultiplicityRoundingFailed: return "MultiplicityRoundingFailed";
    case ErrorCode::EmptyRun: return "EmptyRun";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotSymmetric:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::Unphysical:
    case ErrorCode::OddLength:
    case ErrorCode::ZeroP0:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::InsufficientData:
    case ErrorCode::EmptyRun:
    case ErrorCode::StructureMismatch:
    case ErrorCode::ParseError:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& message, std::string stage)
    : std::runtime_error(message), code_(code), stage_(std::move(stage))
{
}

Error Error::with_stage(std::string stage) const
{
    if (!stage_.empty()) {
        return *this;
    }
    return Error(code_, what(), std::move(stage));
}

}  // namespace gauss_counter

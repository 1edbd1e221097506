#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gauss_counter {

/// Machine-readable failure reasons. The CLI maps these onto exit codes and
/// prints `to_string(code)` in its error JSON, so the names are stable.
enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NotSymmetric,
    NotPositiveDefinite,
    Unphysical,
    ClusterAmbiguity,
    LambdaPrimeOutOfRange,
    OddLength,
    Overflow,
    ZeroP0,
    NonFiniteInput,
    InsufficientData,
    NumericalInstability,
    NoKernelFound,
    RankAmbiguity,
    ComplexRoot,
    RootOutOfRange,
    InvalidRootMultiplicity,
    IllConditioned,
    NegativeWeight,
    MultiplicityRoundingFailed,
    EmptyRun,
    StructureMismatch,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input (as opposed to numerical breakdown).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string stage = {});

    ErrorCode code() const noexcept { return code_; }

    /// Pipeline stage that raised the error, empty when not applicable.
    const std::string& stage() const noexcept { return stage_; }

    /// Returns a copy labelled with `stage` unless a label is already present.
    Error with_stage(std::string stage) const;

private:
    ErrorCode code_;
    std::string stage_;
};

}  // namespace gauss_counter

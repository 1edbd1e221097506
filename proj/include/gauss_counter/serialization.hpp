#pragma once

#include <string_view>

#include <json.hpp>

#include "gauss_counter/error.hpp"
#include "gauss_counter/inverse_engine.hpp"
#include "gauss_counter/ml_estimator.hpp"
#include "gauss_counter/oracle_sampler.hpp"
#include "gauss_counter/projector_kernel.hpp"
#include "gauss_counter/state_model.hpp"

namespace gauss_counter {

using Json = nlohmann::json;

inline constexpr int schema_version = 1;

std::string_view library_version() noexcept;

/// Adds "schema_version" and "version" to an output object.
Json with_envelope(Json body);

// Writers. Doubles are written in their shortest round-trip form; 100-digit
// probabilities additionally carry "probabilities_decimal" strings.
Json to_json(const GaussianStateSpec& spec);
Json to_json(const NormalParameters& np);
Json to_json(const CanonicalParameters& cp);
Json to_json(const ValidationReport& report);
Json to_json(const PhotonDistribution<double>& p);
Json to_json(const PhotonDistribution<Real>& p);
Json to_json(const ProjectorPolynomial<double>& poly);
Json to_json(const SampleRun& run);
Json to_json(const InversionReport& report);
Json to_json(const FitResult& result);
Json to_json(const MonteCarloEstimate& estimate);
Json to_json(const Error& error);

// Readers. Throw ParseError (or DimensionMismatch) on malformed input and
// reject a schema_version other than 1 when one is present.
GaussianStateSpec state_from_json(const Json& j);
NormalParameters normal_parameters_from_json(const Json& j);
/// Prefers "probabilities_decimal" when present.
PhotonDistribution<Real> distribution_from_json(const Json& j);
SampleRun sample_run_from_json(const Json& j);
StructureHypothesis structure_from_json(const Json& j);

/// Parses text, mapping syntax errors to ParseError.
Json parse_json(std::string_view text);

}  // namespace gauss_counter

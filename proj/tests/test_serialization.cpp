#include <doctest.h>

#include <cmath>

#include "gauss_counter/error.hpp"
#include "gauss_counter/forward_engine.hpp"
#include "gauss_counter/serialization.hpp"

using namespace gauss_counter;

TEST_CASE("envelope carries schema and library version")
{
    const Json j = with_envelope(Json::object());
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("version") == std::string(library_version()));
}

TEST_CASE("state round trip")
{
    Eigen::MatrixXd cov(2, 2);
    cov << 2.0, 0.3, 0.3, 1.5;
    const GaussianStateSpec spec{1, cov, Eigen::Vector2d(0.1, -0.7)};
    const Json j = to_json(spec);
    CHECK(j.contains("mode_count"));
    CHECK(j.contains("covariance"));
    CHECK(j.contains("displacement"));
    const auto back = state_from_json(parse_json(j.dump()));
    CHECK(back.mode_count == 1);
    CHECK(back.covariance == cov);
    CHECK(back.displacement == spec.displacement);
}

TEST_CASE("normal parameters round trip, bare or nested")
{
    const NormalParameters np{{2.0, 1.0 / 3.0}, {2, 2}, {std::sqrt(2.0), 0.0}};
    const Json j = to_json(np);
    const auto back = normal_parameters_from_json(parse_json(j.dump()));
    CHECK(back.eigenvalues == np.eigenvalues);
    CHECK(back.multiplicities == np.multiplicities);
    CHECK(back.displacement_norms == np.displacement_norms);
    const auto nested = normal_parameters_from_json(Json{{"parameters", j}});
    CHECK(nested.eigenvalues == np.eigenvalues);
}

TEST_CASE("100-digit distributions survive a text round trip")
{
    const auto p = forward_distribution<Real>({{2.0}, {2}, {1.0}}, 8);
    const Json j = to_json(p);
    CHECK(j.at("probabilities_decimal").size() == 9);
    CHECK(j.at("max_photons") == 8);
    const auto back = distribution_from_json(parse_json(j.dump()));
    for (std::size_t n = 0; n < p.probabilities.size(); ++n) {
        CHECK(to_double(abs(back.probabilities[n] - p.probabilities[n])) <= 1e-90);
    }
}

TEST_CASE("sample run round trip")
{
    const SampleRun run{2, 17, 30, 0.8, {{0, 10}, {3, 20}}};
    const Json j = to_json(run);
    CHECK(j.at("counts").at("3") == 20);
    const auto back = sample_run_from_json(parse_json(j.dump()));
    CHECK(back.mode_count == 2);
    CHECK(back.seed == 17u);
    CHECK(back.sample_count == 30u);
    CHECK(back.efficiency == 0.8);
    CHECK(back.counts == run.counts);
}

TEST_CASE("error JSON uses the stable code names")
{
    const Json j = to_json(Error(ErrorCode::ZeroP0, "p0 is zero", "probabilities_to_f"));
    CHECK(j.at("error") == "ZeroP0");
    CHECK(j.at("stage") == "probabilities_to_f");
}

TEST_CASE("malformed input is a ParseError")
{
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code([] { parse_json("{not json"); }) == ErrorCode::ParseError);
    CHECK(code([] { normal_parameters_from_json(Json{{"eigenvalues", "x"}}); }) == ErrorCode::ParseError);
    CHECK(code([] { state_from_json(Json{{"schema_version", 2}, {"mode_count", 1}}); })
          == ErrorCode::ParseError);
}

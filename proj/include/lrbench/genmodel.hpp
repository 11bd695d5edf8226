#pragma once

// Synthetic hierarchical-Gaussian evidence world.
//
// A source has a latent mean theta drawn from one of three populations:
//   C  crime-relevant sources
//   D  reference sources under H2
//   T  trace sources under H2
// Measurements on objects from a source are N(theta, sigma^2). Object
// sampling and measurement error are folded into the single sigma.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrbench/random.hpp"

namespace lrbench::genmodel {

struct PopulationModel {
    double mu = 0.0;
    double tau = 0.0;

    bool operator==(const PopulationModel&) const = default;
};

struct SourceParams {
    double theta = 0.0;

    bool operator==(const SourceParams&) const = default;
};

struct NoiseModel {
    double sigma = 1.0;

    bool operator==(const NoiseModel&) const = default;
};

enum class ScenarioKind { TraceCrimeRelevant, ReferenceCrimeRelevant, DistinctionIrrelevant };

enum class ScoreKind { SignedDifference, AbsoluteDifference };

enum class Hypothesis { H1, H2 };

struct WorldConfig {
    PopulationModel popC;
    PopulationModel popD;
    PopulationModel popT;
    NoiseModel noise;
    double prior_h1 = 0.5;
    ScenarioKind scenario = ScenarioKind::ReferenceCrimeRelevant;
    ScoreKind score_kind = ScoreKind::SignedDifference;
    int n_trace = 1;
    int n_ref = 1;

    bool operator==(const WorldConfig&) const = default;

    // Variance of the summarized (averaged) trace / reference measurement.
    double trace_var() const { return noise.sigma * noise.sigma / n_trace; }
    double ref_var() const { return noise.sigma * noise.sigma / n_ref; }
};

struct CaseRecord {
    Hypothesis truth = Hypothesis::H1;
    SourceParams r;
    SourceParams trace_source;
    std::vector<double> x;
    std::vector<double> y;

    bool operator==(const CaseRecord&) const = default;
};

// Throws ConfigError describing the first violated invariant.
void validate(const PopulationModel& pop, std::string_view name = "population");
void validate(const WorldConfig& world);

// The world used as the acceptance fixture.
WorldConfig default_world();

SourceParams sample_source(const PopulationModel& pop, Rng& rng);
double sample_measurement(const SourceParams& src, const NoiseModel& noise, Rng& rng);

// Draws truth ~ Bernoulli(prior_h1), then the sources and measurements of
// the matching sampling model. Assumes a validated world.
CaseRecord generate_case(const WorldConfig& world, Rng& rng);

// Same as generate_case but the hypothesis is fixed by the caller.
CaseRecord generate_case_given(const WorldConfig& world, Hypothesis truth, Rng& rng);

// Case `index` of the sequence keyed by `master_seed`; independent of any
// other index.
CaseRecord generate_indexed_case(const WorldConfig& world, std::uint64_t master_seed,
                                 std::uint64_t index);

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(ScoreKind kind);
std::string_view to_string(Hypothesis h);
ScenarioKind scenario_from_string(std::string_view name);
ScoreKind score_kind_from_string(std::string_view name);

// JSON schema uses the field names of WorldConfig verbatim; unknown keys and
// invalid values raise ConfigError. n_trace / n_ref default to 1.
WorldConfig world_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WorldConfig& world);

}  // namespace lrbench::genmodel

#include "lrbench/genmodel.hpp"

#include <cmath>
#include <set>

#include "lrbench/errors.hpp"

namespace lrbench::genmodel {

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string field_error(std::string_view field, std::string_view msg) {
    return std::string(field) + ": " + std::string(msg);
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         std::string_view where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
        }
    }
}

double read_number(const nlohmann::json& j, const std::string& key, std::string_view where) {
    if (!j.contains(key)) {
        throw ConfigError(std::string(where) + ": missing key \"" + key + "\"");
    }
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string(where) + ": \"" + key + "\" must be a number");
    }
    return v.get<double>();
}

PopulationModel population_from_json(const nlohmann::json& j, const std::string& name) {
    if (!j.is_object()) throw ConfigError(name + ": expected an object");
    reject_unknown_keys(j, {"mu", "tau"}, name);
    return PopulationModel{read_number(j, "mu", name), read_number(j, "tau", name)};
}

int read_count(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) return 1;
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError(field_error(key, "must be a positive integer"));
    }
    const auto n = v.get<long long>();
    if (n < 1 || n > 1'000'000) throw ConfigError(field_error(key, "must be a positive integer"));
    return static_cast<int>(n);
}

}  // namespace

void validate(const PopulationModel& pop, std::string_view name) {
    if (!finite(pop.mu) || !finite(pop.tau)) {
        throw ConfigError(field_error(name, "mu and tau must be finite"));
    }
    if (pop.tau < 0.0) throw ConfigError(field_error(name, "tau must be >= 0"));
}

void validate(const WorldConfig& world) {
    validate(world.popC, "popC");
    validate(world.popD, "popD");
    validate(world.popT, "popT");
    if (!finite(world.noise.sigma) || world.noise.sigma <= 0.0) {
        throw ConfigError("noise.sigma must be finite and > 0");
    }
    if (!(world.prior_h1 > 0.0 && world.prior_h1 < 1.0)) {
        throw ConfigError("prior_h1 must lie strictly inside (0, 1)");
    }
    if (world.n_trace < 1 || world.n_ref < 1) {
        throw ConfigError("n_trace and n_ref must be positive");
    }
    switch (world.scenario) {
        case ScenarioKind::TraceCrimeRelevant:
            if (!(world.popC == world.popT)) {
                throw ConfigError("scenario TraceCrimeRelevant requires popC == popT");
            }
            break;
        case ScenarioKind::ReferenceCrimeRelevant:
            if (!(world.popC == world.popD)) {
                throw ConfigError("scenario ReferenceCrimeRelevant requires popC == popD");
            }
            break;
        case ScenarioKind::DistinctionIrrelevant:
            if (!(world.popC == world.popD) || !(world.popC == world.popT)) {
                throw ConfigError("scenario DistinctionIrrelevant requires popC == popD == popT");
            }
            break;
    }
}

WorldConfig default_world() {
    WorldConfig w;
    w.popC = {0.0, 1.0};
    w.popD = {0.0, 1.0};
    w.popT = {1.0, 1.0};
    w.noise = {0.5};
    w.prior_h1 = 0.5;
    w.scenario = ScenarioKind::ReferenceCrimeRelevant;
    w.score_kind = ScoreKind::SignedDifference;
    w.n_trace = 1;
    w.n_ref = 1;
    return w;
}

SourceParams sample_source(const PopulationModel& pop, Rng& rng) {
    // std::normal_distribution requires a positive stddev.
    if (pop.tau == 0.0) return {pop.mu};
    std::normal_distribution<double> dist(pop.mu, pop.tau);
    return {dist(rng)};
}

double sample_measurement(const SourceParams& src, const NoiseModel& noise, Rng& rng) {
    std::normal_distribution<double> dist(src.theta, noise.sigma);
    return dist(rng);
}

CaseRecord generate_case_given(const WorldConfig& world, Hypothesis truth, Rng& rng) {
    CaseRecord c;
    c.truth = truth;
    if (truth == Hypothesis::H1) {
        c.r = sample_source(world.popC, rng);
        c.trace_source = c.r;
    } else {
        c.r = sample_source(world.popD, rng);
        c.trace_source = sample_source(world.popT, rng);
    }
    c.x.reserve(static_cast<std::size_t>(world.n_trace));
    c.y.reserve(static_cast<std::size_t>(world.n_ref));
    for (int i = 0; i < world.n_trace; ++i) {
        c.x.push_back(sample_measurement(c.trace_source, world.noise, rng));
    }
    for (int i = 0; i < world.n_ref; ++i) {
        c.y.push_back(sample_measurement(c.r, world.noise, rng));
    }
    return c;
}

CaseRecord generate_case(const WorldConfig& world, Rng& rng) {
    std::bernoulli_distribution coin(world.prior_h1);
    const Hypothesis truth = coin(rng) ? Hypothesis::H1 : Hypothesis::H2;
    return generate_case_given(world, truth, rng);
}

CaseRecord generate_indexed_case(const WorldConfig& world, std::uint64_t master_seed,
                                 std::uint64_t index) {
    Rng rng = make_stream(master_seed, index, StreamTag::Case);
    return generate_case(world, rng);
}

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::TraceCrimeRelevant: return "TraceCrimeRelevant";
        case ScenarioKind::ReferenceCrimeRelevant: return "ReferenceCrimeRelevant";
        case ScenarioKind::DistinctionIrrelevant: return "DistinctionIrrelevant";
    }
    return "?";
}

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::SignedDifference: return "SignedDifference";
        case ScoreKind::AbsoluteDifference: return "AbsoluteDifference";
    }
    return "?";
}

std::string_view to_string(Hypothesis h) { return h == Hypothesis::H1 ? "H1" : "H2"; }

ScenarioKind scenario_from_string(std::string_view name) {
    for (auto k : {ScenarioKind::TraceCrimeRelevant, ScenarioKind::ReferenceCrimeRelevant,
                   ScenarioKind::DistinctionIrrelevant}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("scenario: unknown value \"" + std::string(name) + "\"");
}

ScoreKind score_kind_from_string(std::string_view name) {
    for (auto k : {ScoreKind::SignedDifference, ScoreKind::AbsoluteDifference}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("score_kind: unknown value \"" + std::string(name) + "\"");
}

WorldConfig world_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("world: expected an object");
    reject_unknown_keys(j,
                        {"popC", "popD", "popT", "noise", "prior_h1", "scenario", "score_kind",
                         "n_trace", "n_ref"},
                        "world");
    for (const char* key : {"popC", "popD", "popT", "noise", "prior_h1", "scenario", "score_kind"}) {
        if (!j.contains(key)) throw ConfigError(std::string("world: missing key \"") + key + "\"");
    }
    WorldConfig w;
    w.popC = population_from_json(j.at("popC"), "popC");
    w.popD = population_from_json(j.at("popD"), "popD");
    w.popT = population_from_json(j.at("popT"), "popT");
    const auto& noise = j.at("noise");
    if (!noise.is_object()) throw ConfigError("noise: expected an object");
    reject_unknown_keys(noise, {"sigma"}, "noise");
    w.noise.sigma = read_number(noise, "sigma", "noise");
    w.prior_h1 = read_number(j, "prior_h1", "world");
    if (!j.at("scenario").is_string()) throw ConfigError("scenario: expected a string");
    w.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    if (!j.at("score_kind").is_string()) throw ConfigError("score_kind: expected a string");
    w.score_kind = score_kind_from_string(j.at("score_kind").get<std::string>());
    w.n_trace = read_count(j, "n_trace");
    w.n_ref = read_count(j, "n_ref");
    validate(w);
    return w;
}

nlohmann::json to_json(const WorldConfig& w) {
    auto pop = [](const PopulationModel& p) { return nlohmann::json{{"mu", p.mu}, {"tau", p.tau}}; };
    return nlohmann::json{{"popC", pop(w.popC)},
                          {"popD", pop(w.popD)},
                          {"popT", pop(w.popT)},
                          {"noise", {{"sigma", w.noise.sigma}}},
                          {"prior_h1", w.prior_h1},
                          {"scenario", std::string(to_string(w.scenario))},
                          {"score_kind", std::string(to_string(w.score_kind))},
                          {"n_trace", w.n_trace},
                          {"n_ref", w.n_ref}};
}

}  // namespace lrbench::genmodel

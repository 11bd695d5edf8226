#include "lrbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "lrbench/errors.hpp"
#include "lrbench/gaussian.hpp"

namespace lrbench::harness {

namespace {

using scoring::SampleStats;
using scoring::sample_stats;

constexpr double kTieFloor = 1e-12;

ScoreSummary summarize_scores(const std::vector<double>& v) {
    const SampleStats s = sample_stats(v);
    return {s.mean, s.std_error};
}

SampleStats paired(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return sample_stats(d);
}

double finite_score(ScoringRule rule, double p, Hypothesis truth, std::uint64_t index) {
    const double s = scoring::score(rule, p, truth);
    if (std::isinf(s)) {
        throw EvaluationError("case " + std::to_string(index) +
                              ": -infinity score; LR clamping failed to keep the posterior "
                              "inside (0, 1)");
    }
    return s;
}

// p log2 q + (1 - p) log2 (1 - q), with zero-weight terms dropped.
double cross_entropy_term(double p, double q) {
    double v = 0.0;
    if (p > 0.0) v += p * std::log2(q);
    if (p < 1.0) v += (1.0 - p) * std::log2(1.0 - q);
    return v;
}

std::vector<std::string> sorted_keys_of(const nlohmann::json& j) {
    std::vector<std::string> keys;
    for (const auto& [k, _] : j.items()) keys.push_back(k);
    return keys;
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& k : sorted_keys_of(j)) {
        if (!allowed.contains(k)) throw ConfigError(where + ": unknown key \"" + k + "\"");
    }
}

double number_at(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw ConfigError("\"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

std::uint64_t unsigned_at(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw ConfigError("\"" + key + "\" must be a non-negative integer");
}

bool bool_at(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_boolean()) throw ConfigError("\"" + key + "\" must be true or false");
    return j.at(key).get<bool>();
}

std::string string_at(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_string()) throw ConfigError("\"" + key + "\" must be a string");
    return j.at(key).get<std::string>();
}

// Applies a partial world (any of popC, popD, popT, noise) on top of base.
// Scenario equalities are not enforced: an override describes the world a
// miscalibrated system believes in.
WorldConfig apply_override(WorldConfig base, const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown(j, {"popC", "popD", "popT", "noise"}, where);
    auto pop = [&](const char* key, genmodel::PopulationModel& target) {
        if (!j.contains(key)) return;
        const auto& p = j.at(key);
        if (!p.is_object()) throw ConfigError(std::string(key) + ": expected an object");
        reject_unknown(p, {"mu", "tau"}, key);
        if (p.contains("mu")) target.mu = number_at(p, "mu");
        if (p.contains("tau")) target.tau = number_at(p, "tau");
        genmodel::validate(target, key);
    };
    pop("popC", base.popC);
    pop("popD", base.popD);
    pop("popT", base.popT);
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        if (!n.is_object()) throw ConfigError("noise: expected an object");
        reject_unknown(n, {"sigma"}, "noise");
        base.noise.sigma = number_at(n, "sigma");
        if (!(base.noise.sigma > 0.0) || !std::isfinite(base.noise.sigma)) {
            throw ConfigError("noise.sigma must be finite and > 0");
        }
    }
    return base;
}

nlohmann::json pop_json(const genmodel::PopulationModel& p) { return {{"mu", p.mu}, {"tau", p.tau}}; }

bool log_neg_inf(double v) { return std::isinf(v) && v < 0.0; }

}  // namespace

std::string_view to_string(Conditioning c) { return c == Conditioning::Proper ? "Proper" : "Naive"; }

std::string_view to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Confirmed: return "Confirmed";
        case VerdictStatus::Tie: return "Tie";
        case VerdictStatus::Violated: return "Violated";
    }
    return "?";
}

const std::vector<Claim>& ranking_claims() {
    static const std::vector<Claim> claims = [] {
        const std::pair<SystemId, SystemId> pairs[] = {
            {SystemId::SSFLR, SystemId::SSYASLR},   {SystemId::SSYASLR, SystemId::SSSLR},
            {SystemId::SSSLR, SystemId::PriorOnly}, {SystemId::CSFLR, SystemId::CSYASLR},
            {SystemId::CSFLR, SystemId::CSXASLR},   {SystemId::CSYASLR, SystemId::CSSLR},
            {SystemId::CSXASLR, SystemId::CSSLR},   {SystemId::CSSLR, SystemId::PriorOnly},
            {SystemId::SSFLR, SystemId::CSFLR},     {SystemId::SSYASLR, SystemId::CSYASLR},
            {SystemId::SSSLR, SystemId::CSSLR},
        };
        std::vector<Claim> out;
        for (const auto& [a, b] : pairs) {
            out.push_back({std::string(lrsys::to_string(a)) + ">=" + std::string(lrsys::to_string(b)), a, b});
        }
        return out;
    }();
    return claims;
}

Verdict classify(const std::string& claim_id, SystemId better, SystemId worse, double mean_diff,
                 double std_error_diff) {
    Verdict v;
    v.claim_id = claim_id;
    v.better = better;
    v.worse = worse;
    v.mean_diff = mean_diff;
    v.std_error_diff = std_error_diff;
    const double band = 2.0 * std_error_diff + kTieFloor;
    if (std_error_diff > 0.0) {
        v.margin_in_se = mean_diff / std_error_diff;
    } else {
        v.margin_in_se = mean_diff == 0.0 ? 0.0 : std::copysign(INFINITY, mean_diff);
    }
    if (mean_diff > band) {
        v.status = VerdictStatus::Confirmed;
    } else if (mean_diff < -band) {
        v.status = VerdictStatus::Violated;
    } else {
        v.status = VerdictStatus::Tie;
    }
    return v;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    genmodel::validate(cfg.world);
    if (cfg.systems.empty()) throw ConfigError("systems: at least one system is required");
    std::set<SystemId> seen;
    for (SystemId s : cfg.systems) {
        if (!seen.insert(s).second) {
            throw ConfigError("systems: duplicate entry " + std::string(lrsys::to_string(s)));
        }
    }
    if (cfg.n_cases < 1000) throw ConfigError("n_cases must be >= 1000");
    oracle::validate(cfg.oracle);
    for (const auto& [id, w] : cfg.model_overrides) {
        genmodel::validate(w.popC, "popC");
        genmodel::validate(w.popD, "popD");
        genmodel::validate(w.popT, "popT");
        if (!(w.noise.sigma > 0.0)) throw ConfigError("model override noise.sigma must be > 0");
    }
    if (cfg.calibration_bins < 2) throw ConfigError("calibration.bins must be >= 2");
    for (double k : cfg.tail_k) {
        if (!(k >= 1.0) || !std::isfinite(k)) throw ConfigError("tail_k values must be >= 1");
    }
    if (!(cfg.demand_lr_min > 0.0 && cfg.demand_lr_min < 1.0 && cfg.demand_lr_max > 1.0 &&
          std::isfinite(cfg.demand_lr_max))) {
        throw ConfigError("demand range must satisfy 0 < lr_min < 1 < lr_max");
    }
    std::vector<std::string> warnings;
    if (cfg.n_cases < 10000) {
        warnings.push_back("n_cases = " + std::to_string(cfg.n_cases) +
                           " is below 10000; ranking verdicts have low power");
    }
    return warnings;
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    if (j.contains("popC")) {
        cfg.world = genmodel::world_from_json(j);
        return cfg;
    }
    reject_unknown(j,
                   {"world", "systems", "rule", "n_cases", "master_seed", "oracle_check", "oracle",
                    "model_overrides", "conditioning", "calibration", "tail_k", "demand",
                    "threads"},
                   "config");
    if (!j.contains("world")) throw ConfigError("config: missing key \"world\"");
    cfg.world = genmodel::world_from_json(j.at("world"));
    if (j.contains("systems")) {
        const auto& s = j.at("systems");
        if (!s.is_array()) throw ConfigError("\"systems\" must be an array of system names");
        cfg.systems.clear();
        for (const auto& name : s) {
            if (!name.is_string()) throw ConfigError("\"systems\" must be an array of system names");
            cfg.systems.push_back(lrsys::system_from_string(name.get<std::string>()));
        }
    }
    if (j.contains("rule")) cfg.rule = scoring::rule_from_string(string_at(j, "rule"));
    if (j.contains("n_cases")) cfg.n_cases = unsigned_at(j, "n_cases");
    if (j.contains("master_seed")) cfg.master_seed = unsigned_at(j, "master_seed");
    if (j.contains("oracle_check")) cfg.oracle_check = bool_at(j, "oracle_check");
    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        if (!o.is_object()) throw ConfigError("\"oracle\" must be an object");
        reject_unknown(o,
                       {"n_paths", "bin_width", "anchor_tolerance", "bandwidth_scale",
                        "bootstrap_replicates", "n_batches", "min_accepted"},
                       "oracle");
        if (o.contains("n_paths")) cfg.oracle.n_paths = unsigned_at(o, "n_paths");
        if (o.contains("bin_width")) cfg.oracle.bin_width = number_at(o, "bin_width");
        if (o.contains("anchor_tolerance")) cfg.oracle.anchor_tolerance = number_at(o, "anchor_tolerance");
        if (o.contains("bandwidth_scale")) cfg.oracle.bandwidth_scale = number_at(o, "bandwidth_scale");
        if (o.contains("bootstrap_replicates")) {
            cfg.oracle.bootstrap_replicates = static_cast<int>(unsigned_at(o, "bootstrap_replicates"));
        }
        if (o.contains("n_batches")) cfg.oracle.n_batches = unsigned_at(o, "n_batches");
        if (o.contains("min_accepted")) cfg.oracle.min_accepted = unsigned_at(o, "min_accepted");
    }
    if (j.contains("model_overrides")) {
        const auto& m = j.at("model_overrides");
        if (!m.is_object()) throw ConfigError("\"model_overrides\" must be an object keyed by system");
        for (const auto& [name, partial] : m.items()) {
            cfg.model_overrides[lrsys::system_from_string(name)] =
                apply_override(cfg.world, partial, "model_overrides." + name);
        }
    }
    if (j.contains("conditioning")) {
        const std::string c = string_at(j, "conditioning");
        if (c == "Proper") {
            cfg.conditioning = Conditioning::Proper;
        } else if (c == "Naive") {
            cfg.conditioning = Conditioning::Naive;
        } else {
            throw ConfigError("conditioning: unknown value \"" + c + "\"");
        }
    }
    if (j.contains("calibration")) {
        const auto& c = j.at("calibration");
        if (!c.is_object()) throw ConfigError("\"calibration\" must be an object");
        reject_unknown(c, {"bins", "min_count"}, "calibration");
        if (c.contains("bins")) cfg.calibration_bins = static_cast<int>(unsigned_at(c, "bins"));
        if (c.contains("min_count")) cfg.calibration_min_count = unsigned_at(c, "min_count");
    }
    if (j.contains("tail_k")) {
        const auto& k = j.at("tail_k");
        if (!k.is_array()) throw ConfigError("\"tail_k\" must be an array of numbers");
        cfg.tail_k.clear();
        for (const auto& v : k) {
            if (!v.is_number()) throw ConfigError("\"tail_k\" must be an array of numbers");
            cfg.tail_k.push_back(v.get<double>());
        }
    }
    if (j.contains("demand")) {
        const auto& d = j.at("demand");
        if (!d.is_object()) throw ConfigError("\"demand\" must be an object");
        reject_unknown(d, {"lr_min", "lr_max"}, "demand");
        if (d.contains("lr_min")) cfg.demand_lr_min = number_at(d, "lr_min");
        if (d.contains("lr_max")) cfg.demand_lr_max = number_at(d, "lr_max");
    }
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(unsigned_at(j, "threads"));
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json systems = nlohmann::json::array();
    for (SystemId s : cfg.systems) systems.push_back(std::string(lrsys::to_string(s)));
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& [id, w] : cfg.model_overrides) {
        overrides[std::string(lrsys::to_string(id))] = {{"popC", pop_json(w.popC)},
                                                        {"popD", pop_json(w.popD)},
                                                        {"popT", pop_json(w.popT)},
                                                        {"noise", {{"sigma", w.noise.sigma}}}};
    }
    return {
        {"world", genmodel::to_json(cfg.world)},
        {"systems", systems},
        {"rule", std::string(scoring::to_string(cfg.rule))},
        {"n_cases", cfg.n_cases},
        {"master_seed", cfg.master_seed},
        {"oracle_check", cfg.oracle_check},
        {"oracle",
         {{"n_paths", cfg.oracle.n_paths},
          {"bin_width", cfg.oracle.bin_width},
          {"anchor_tolerance", cfg.oracle.anchor_tolerance},
          {"bandwidth_scale", cfg.oracle.bandwidth_scale},
          {"bootstrap_replicates", cfg.oracle.bootstrap_replicates},
          {"n_batches", cfg.oracle.n_batches},
          {"min_accepted", cfg.oracle.min_accepted}}},
        {"model_overrides", overrides},
        {"conditioning", std::string(to_string(cfg.conditioning))},
        {"calibration", {{"bins", cfg.calibration_bins}, {"min_count", cfg.calibration_min_count}}},
        {"tail_k", cfg.tail_k},
        {"demand", {{"lr_min", cfg.demand_lr_min}, {"lr_max", cfg.demand_lr_max}}},
    };
}

const PairedDiff& EvalReport::diff(SystemId a, SystemId b) const {
    for (const auto& d : paired_diffs) {
        if (d.a == a && d.b == b) return d;
    }
    throw ConfigError("no paired difference for " + std::string(lrsys::to_string(a)) + " vs " +
                      std::string(lrsys::to_string(b)));
}

std::size_t EvalReport::count(VerdictStatus s) const {
    return static_cast<std::size_t>(std::count_if(ranking_verdicts.begin(), ranking_verdicts.end(),
                                                  [&](const Verdict& v) { return v.status == s; }));
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    unsigned t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
    std::mutex mu;
    std::size_t first_bad = n;
    std::exception_ptr first_error;
    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < first_bad) {
                    first_bad = i;
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };
    if (t <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < t; ++w) {
            pool.emplace_back(worker, n * w / t, n * (w + 1) / t);
        }
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

SystemOutput system_posterior(SystemId id, const CaseRecord& c, const WorldConfig& model,
                              Conditioning conditioning) {
    const lrsys::LrResult r = lrsys::evaluate(id, c, model);
    double update = r.log_lr;
    if (conditioning == Conditioning::Proper) update += lrsys::log_conditioning_term(id, c, model);
    const lrsys::ClampedLogLr cl = lrsys::clamp_log_lr(update);
    return {r.lr, lrsys::posterior_from_log_lr(cl.log_lr, model.prior_h1), cl.clamped};
}

EvalReport run_experiment(const ExperimentConfig& cfg) {
    EvalReport rep;
    rep.warnings = validate(cfg);
    rep.config = cfg;
    rep.systems = cfg.systems;
    std::sort(rep.systems.begin(), rep.systems.end());
    const std::size_t n = cfg.n_cases;
    const std::size_t ns = rep.systems.size();

    std::vector<const WorldConfig*> models(ns, &cfg.world);
    for (std::size_t s = 0; s < ns; ++s) {
        if (auto it = cfg.model_overrides.find(rep.systems[s]); it != cfg.model_overrides.end()) {
            models[s] = &it->second;
        }
    }

    std::vector<std::vector<double>> scores(ns, std::vector<double>(n));
    std::vector<std::vector<double>> posts(ns, std::vector<double>(n));
    std::vector<std::vector<double>> lrs(ns, std::vector<double>(n));
    std::vector<std::vector<char>> clamped(ns, std::vector<char>(n, 0));
    std::vector<CaseRecord> records(n);

    parallel_for(n, cfg.threads, [&](std::size_t i) {
        try {
            records[i] = genmodel::generate_indexed_case(cfg.world, cfg.master_seed, i);
            const CaseRecord& c = records[i];
            for (std::size_t s = 0; s < ns; ++s) {
                const SystemOutput out = system_posterior(rep.systems[s], c, *models[s], cfg.conditioning);
                lrs[s][i] = out.lr;
                posts[s][i] = out.posterior;
                clamped[s][i] = out.clamped ? 1 : 0;
                scores[s][i] = scoring::score(cfg.rule, out.posterior, c.truth);
            }
        } catch (const CaseError&) {
            throw;
        } catch (const std::exception& e) {
            throw CaseError(i, e.what());
        }
    });

    for (const auto& c : records) rep.n_h1 += c.truth == Hypothesis::H1 ? 1 : 0;

    for (std::size_t s = 0; s < ns; ++s) {
        SystemSummary sum;
        for (std::size_t i = 0; i < n; ++i) {
            if (log_neg_inf(scores[s][i])) ++sum.n_neg_inf;
            sum.clamp_events += static_cast<std::size_t>(clamped[s][i]);
        }
        if (sum.n_neg_inf > 0) {
            throw EvaluationError(std::string(lrsys::to_string(rep.systems[s])) + ": " +
                                  std::to_string(sum.n_neg_inf) +
                                  " cases scored -infinity; LR clamping failed (" +
                                  std::to_string(sum.clamp_events) + " clamp events)");
        }
        const SampleStats st = sample_stats(scores[s]);
        sum.mean_score = st.mean;
        sum.std_error = st.std_error;
        rep.per_system[rep.systems[s]] = sum;

        std::vector<scoring::ScoredRecord> recs(n);
        for (std::size_t i = 0; i < n; ++i) recs[i] = {posts[s][i], records[i].truth};
        rep.calibration[rep.systems[s]] =
            scoring::calibration_report(recs, cfg.calibration_bins, cfg.calibration_min_count);
    }

    for (std::size_t a = 0; a < ns; ++a) {
        for (std::size_t b = 0; b < ns; ++b) {
            if (a == b) continue;
            const SampleStats st = paired(scores[a], scores[b]);
            rep.paired_diffs.push_back({rep.systems[a], rep.systems[b], st.mean, st.std_error});
        }
    }

    const std::set<SystemId> present(rep.systems.begin(), rep.systems.end());
    const bool all_claims = std::all_of(ranking_claims().begin(), ranking_claims().end(), [&](const Claim& c) {
        return present.contains(c.better) && present.contains(c.worse);
    });
    if (all_claims) {
        rep.ranking_verdicts = verify_ranking(rep);
    } else {
        rep.warnings.push_back("ranking claims not checked: not every claimed system was run");
    }

    if (cfg.oracle_check) {
        std::vector<SystemId> sys;
        for (SystemId s : rep.systems) {
            if (s != SystemId::PriorOnly) sys.push_back(s);
        }
        rep.oracle_grid = oracle::path_oracle_grid(sys, cfg.world, cfg.oracle, cfg.master_seed);
    }

    if (cfg.keep_cases) {
        rep.cases.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            CaseRow& row = rep.cases[i];
            row.case_id = i;
            row.record = std::move(records[i]);
            row.lr.resize(ns);
            row.posterior.resize(ns);
            for (std::size_t s = 0; s < ns; ++s) {
                row.lr[s] = lrs[s][i];
                row.posterior[s] = posts[s][i];
            }
        }
    }
    return rep;
}

std::vector<Verdict> verify_ranking(const EvalReport& report) {
    std::vector<Verdict> out;
    for (const Claim& c : ranking_claims()) {
        if (!report.per_system.contains(c.better) || !report.per_system.contains(c.worse)) {
            throw ConfigError("verify_ranking: report lacks a system named by claim " + c.id);
        }
        const PairedDiff& d = report.diff(c.better, c.worse);
        out.push_back(classify(c.id, c.better, c.worse, d.mean_diff, d.std_error_diff));
    }
    return out;
}

IllConditioningReport ill_conditioning_experiment(const WorldConfig& world, std::size_t n_cases,
                                                  std::uint64_t seed, ScoringRule rule) {
    genmodel::validate(world);
    if (!(world.popC == world.popD)) {
        throw ConfigError("ill_conditioning_experiment requires popC == popD");
    }
    if (n_cases < 2) throw ConfigError("ill_conditioning_experiment: n_cases must be >= 2");
    std::vector<double> naive(n_cases), proper(n_cases), joint(n_cases), rel(n_cases);
    parallel_for(n_cases, 0, [&](std::size_t i) {
        const CaseRecord c = genmodel::generate_indexed_case(world, seed, i);
        const lrsys::Evidence e = lrsys::summarize(c);
        const double delta = lrsys::score_value(e.x, e.y, world.score_kind);
        const double a = lrsys::evaluate(SystemId::CSXASLR, c, world).log_lr;
        const double b = a + lrsys::log_anchor_lr(e.x, lrsys::AnchorKind::X, world);
        const double j = lrsys::log_joint_lr(delta, e.x, lrsys::AnchorKind::X, world);
        rel[i] = std::fabs(std::expm1(b - j));
        auto post = [&](double log_update) {
            return lrsys::posterior_from_log_lr(lrsys::clamp_log_lr(log_update).log_lr, world.prior_h1);
        };
        naive[i] = finite_score(rule, post(a), c.truth, i);
        proper[i] = finite_score(rule, post(b), c.truth, i);
        joint[i] = finite_score(rule, post(j), c.truth, i);
    });
    IllConditioningReport rep;
    rep.n_cases = n_cases;
    rep.naive = summarize_scores(naive);
    rep.proper = summarize_scores(proper);
    rep.joint = summarize_scores(joint);
    const SampleStats gap = paired(proper, naive);
    rep.gap_mean = gap.mean;
    rep.gap_se = gap.std_error;
    rep.gap_in_se = gap.std_error > 0.0 ? gap.mean / gap.std_error : 0.0;
    rep.max_rel_err_proper_vs_joint = *std::max_element(rel.begin(), rel.end());
    return rep;
}

CsPriorReport cs_update_ss_prior_experiment(const WorldConfig& world, std::size_t n_cases,
                                            std::uint64_t seed, ScoringRule rule) {
    genmodel::validate(world);
    if (!(world.popC == world.popD)) {
        throw ConfigError("cs_update_ss_prior_experiment requires popC == popD");
    }
    if (n_cases < 2) throw ConfigError("cs_update_ss_prior_experiment: n_cases must be >= 2");
    CsPriorReport rep;
    rep.n_cases = n_cases;

    std::vector<double> prior(n_cases), flr(n_cases), slr(n_cases);
    parallel_for(n_cases, 0, [&](std::size_t i) {
        const CaseRecord c = genmodel::generate_indexed_case(world, seed, i);
        prior[i] = finite_score(rule, world.prior_h1, c.truth, i);
        flr[i] = finite_score(
            rule, system_posterior(SystemId::CSFLR, c, world, Conditioning::Proper).posterior, c.truth, i);
        slr[i] = finite_score(
            rule, system_posterior(SystemId::CSSLR, c, world, Conditioning::Proper).posterior, c.truth, i);
    });
    rep.prior_only = summarize_scores(prior);
    rep.csflr_updated = summarize_scores(flr);
    rep.csslr_updated = summarize_scores(slr);
    const SampleStats df = paired(flr, prior);
    const SampleStats ds = paired(slr, prior);
    rep.csflr_vs_prior = classify("CSFLR-updated>=prior", SystemId::CSFLR, SystemId::PriorOnly, df.mean, df.std_error);
    rep.csslr_vs_prior = classify("CSSLR-updated>=prior", SystemId::CSSLR, SystemId::PriorOnly, ds.mean, ds.std_error);

    // References now come from a population shifted away from C, so r
    // itself is evidence and the r-conditioned prior differs from pi.
    WorldConfig v = world;
    v.popD = {world.popC.mu + 2.0, world.popC.tau};
    v.popT = world.popC;
    v.scenario = genmodel::ScenarioKind::TraceCrimeRelevant;
    genmodel::validate(v);
    rep.violating_world = v;

    std::vector<double> rp(n_cases), rpf(n_cases), rps(n_cases);
    const double log_prior_odds = std::log(v.prior_h1) - std::log1p(-v.prior_h1);
    parallel_for(n_cases, 0, [&](std::size_t i) {
        Rng rng = make_stream(seed, i, StreamTag::Violating);
        const CaseRecord c = genmodel::generate_case(v, rng);
        const double r = c.r.theta;
        // f(r | C) vs f(r | D); a degenerate population puts all mass on mu.
        auto log_pop = [&](const genmodel::PopulationModel& p) {
            if (p.tau == 0.0) return r == p.mu ? 0.0 : -INFINITY;
            return gauss::log_pdf(r, p.mu, p.tau * p.tau);
        };
        const double r_odds = log_prior_odds + log_pop(v.popC) - log_pop(v.popD);
        auto post = [&](double log_odds) {
            const double lo = std::clamp(log_odds, std::log(lrsys::kLrFloor), std::log(lrsys::kLrCeil));
            return lrsys::posterior_from_log_lr(lo, 0.5);
        };
        rp[i] = finite_score(rule, post(r_odds), c.truth, i);
        rpf[i] = finite_score(rule, post(r_odds + lrsys::evaluate(SystemId::CSFLR, c, v).log_lr), c.truth, i);
        rps[i] = finite_score(rule, post(r_odds + lrsys::evaluate(SystemId::CSSLR, c, v).log_lr), c.truth, i);
    });
    rep.violating_r_prior = summarize_scores(rp);
    rep.violating_r_prior_csflr = summarize_scores(rpf);
    rep.violating_r_prior_csslr = summarize_scores(rps);
    const SampleStats vf = paired(rpf, rp);
    const SampleStats vs = paired(rps, rp);
    rep.violating_csflr_gap = vf.mean;
    rep.violating_csflr_gap_se = vf.std_error;
    rep.violating_csslr_gap = vs.mean;
    rep.violating_csslr_gap_se = vs.std_error;
    return rep;
}

double csslr_posterior(const CaseRecord& c, const WorldConfig& world) {
    return system_posterior(SystemId::CSSLR, c, world, Conditioning::Proper).posterior;
}

TotalExpectationResult total_expectation_check(const WorldConfig& world, std::size_t n_samples,
                                               std::uint64_t seed,
                                               const TotalExpectationOptions& opts) {
    genmodel::validate(world);
    if (n_samples < 2) throw ConfigError("total_expectation_check: n_samples must be >= 2");
    const StreamTag rhs_tag = opts.shared_samples ? StreamTag::TotalExpectationLhs
                                                  : StreamTag::TotalExpectationRhs;
    std::vector<double> lhs(n_samples), rhs(n_samples);
    parallel_for(n_samples, 0, [&](std::size_t i) {
        Rng a = make_stream(seed, i, StreamTag::TotalExpectationLhs);
        const CaseRecord cl = genmodel::generate_case(world, a);
        const double p = opts.inner(cl, world);
        lhs[i] = cross_entropy_term(p, p);

        Rng b = make_stream(seed, i, rhs_tag);
        const CaseRecord cr = genmodel::generate_case(world, b);
        const double q = opts.inner(cr, world);
        const double w = system_posterior(SystemId::CSFLR, cr, world, Conditioning::Proper).posterior;
        rhs[i] = cross_entropy_term(w, q);
    });
    TotalExpectationResult out;
    const SampleStats l = sample_stats(lhs);
    const SampleStats r = sample_stats(rhs);
    out.lhs = l.mean;
    out.rhs = r.mean;
    out.lhs_se = l.std_error;
    out.rhs_se = r.std_error;
    const double se = std::hypot(l.std_error, r.std_error);
    const double d = out.lhs - out.rhs;
    out.gap_in_se = se > 0.0 ? d / se : (d == 0.0 ? 0.0 : std::copysign(INFINITY, d));
    return out;
}

}  // namespace lrbench::harness

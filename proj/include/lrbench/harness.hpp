#pragma once

// Paired Monte Carlo experiments: every system is scored on the same
// simulated case sequence, so system differences are estimated from
// per-case score differences.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrbench/genmodel.hpp"
#include "lrbench/lrsys.hpp"
#include "lrbench/path_oracle.hpp"
#include "lrbench/scoring.hpp"

namespace lrbench::harness {

using genmodel::CaseRecord;
using genmodel::Hypothesis;
using genmodel::WorldConfig;
using lrsys::SystemId;
using scoring::ScoringRule;

// How an anchored common-source LR turns into posterior odds.
//   Proper: LR x anchor LR x prior odds (the anchor is evidence too).
//   Naive:  LR x prior odds, dropping the anchor term.
enum class Conditioning { Proper, Naive };

std::string_view to_string(Conditioning c);

struct ExperimentConfig {
    WorldConfig world = genmodel::default_world();
    std::vector<SystemId> systems{lrsys::kAllSystems.begin(), lrsys::kAllSystems.end()};
    ScoringRule rule = ScoringRule::Logarithmic;
    std::size_t n_cases = 20000;
    std::uint64_t master_seed = 1;
    bool oracle_check = false;
    oracle::PathOracleConfig oracle;

    // Evaluate a system with densities from a different world than the one
    // generating the cases. Used to build deliberately miscalibrated systems.
    std::map<SystemId, WorldConfig> model_overrides;
    Conditioning conditioning = Conditioning::Proper;

    int calibration_bins = 10;
    std::size_t calibration_min_count = 50;

    // Used by the tail-bound and demand commands.
    std::vector<double> tail_k{3.0, 10.0, 30.0, 100.0};
    double demand_lr_min = 0.01;
    double demand_lr_max = 1000.0;

    unsigned threads = 0;  // 0 = hardware concurrency
    bool keep_cases = true;
};

// Throws ConfigError. Returns non-fatal warnings.
std::vector<std::string> validate(const ExperimentConfig& cfg);

// Accepts either a full experiment object or a bare world object.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct SystemSummary {
    double mean_score = 0.0;
    double std_error = 0.0;
    std::size_t n_neg_inf = 0;
    std::size_t clamp_events = 0;
};

struct PairedDiff {
    SystemId a = SystemId::PriorOnly;
    SystemId b = SystemId::PriorOnly;
    double mean_diff = 0.0;       // mean over cases of score(a) - score(b)
    double std_error_diff = 0.0;
};

enum class VerdictStatus { Confirmed, Tie, Violated };
std::string_view to_string(VerdictStatus s);

struct Claim {
    std::string id;
    SystemId better;
    SystemId worse;
};

// Performance inequalities "better >= worse" checked by verify_ranking.
const std::vector<Claim>& ranking_claims();

struct Verdict {
    std::string claim_id;
    SystemId better = SystemId::PriorOnly;
    SystemId worse = SystemId::PriorOnly;
    VerdictStatus status = VerdictStatus::Tie;
    double mean_diff = 0.0;
    double std_error_diff = 0.0;
    double margin_in_se = 0.0;
};

// Confirmed if diff > 2 SE, Violated if diff < -2 SE, Tie otherwise. Exact
// ties computed by different formulas differ by rounding noise only, so a
// 1e-12 absolute floor is added to the band.
Verdict classify(const std::string& claim_id, SystemId better, SystemId worse, double mean_diff,
                 double std_error_diff);

struct CaseRow {
    std::uint64_t case_id = 0;
    CaseRecord record;
    std::vector<double> lr;         // per system, in EvalReport::systems order
    std::vector<double> posterior;
};

struct EvalReport {
    ExperimentConfig config;
    std::vector<SystemId> systems;  // canonical order
    std::size_t n_h1 = 0;
    std::map<SystemId, SystemSummary> per_system;
    std::vector<PairedDiff> paired_diffs;
    std::map<SystemId, scoring::CalibrationReport> calibration;
    std::vector<Verdict> ranking_verdicts;
    std::vector<oracle::GridComparison> oracle_grid;
    std::vector<std::string> warnings;
    std::vector<CaseRow> cases;

    const PairedDiff& diff(SystemId a, SystemId b) const;
    std::size_t count(VerdictStatus s) const;
};

// Throws CaseError (carrying the case index) if an evaluator fails, and
// EvaluationError if any score is -infinity.
EvalReport run_experiment(const ExperimentConfig& cfg);

// Throws ConfigError if the report lacks a system named by a claim.
std::vector<Verdict> verify_ranking(const EvalReport& report);

// Posterior P(H1 | evidence) a system reports for one case, with its LR
// clamped to [1e-12, 1e12]. `model` is the world whose densities the
// system uses.
struct SystemOutput {
    double lr = 1.0;
    double posterior = 0.5;
    bool clamped = false;
};
SystemOutput system_posterior(SystemId id, const CaseRecord& c, const WorldConfig& model,
                              Conditioning conditioning);

struct ScoreSummary {
    double mean = 0.0;
    double std_error = 0.0;
};

struct IllConditioningReport {
    std::size_t n_cases = 0;
    ScoreSummary naive;
    ScoreSummary proper;
    ScoreSummary joint;
    double gap_mean = 0.0;  // proper - naive, paired
    double gap_se = 0.0;
    double gap_in_se = 0.0;
    double max_rel_err_proper_vs_joint = 0.0;
};

// Requires popC == popD (the Y anchor carries no evidence) so that the X
// anchor term is the only piece dropped by the naive construction.
IllConditioningReport ill_conditioning_experiment(const WorldConfig& world, std::size_t n_cases,
                                                  std::uint64_t seed,
                                                  ScoringRule rule = ScoringRule::Logarithmic);

struct CsPriorReport {
    std::size_t n_cases = 0;
    ScoreSummary prior_only;
    ScoreSummary csflr_updated;
    ScoreSummary csslr_updated;
    Verdict csflr_vs_prior;
    Verdict csslr_vs_prior;

    // Descriptive run on a world with popC != popD, where the prior
    // P(H1 | r) depends on r.
    WorldConfig violating_world;
    ScoreSummary violating_r_prior;
    ScoreSummary violating_r_prior_csflr;
    ScoreSummary violating_r_prior_csslr;
    double violating_csflr_gap = 0.0;  // csflr-updated minus r-prior
    double violating_csflr_gap_se = 0.0;
    double violating_csslr_gap = 0.0;
    double violating_csslr_gap_se = 0.0;
};

// Requires popC == popD. Prior-only vs the same prior updated by the
// common-source feature and score LRs.
CsPriorReport cs_update_ss_prior_experiment(const WorldConfig& world, std::size_t n_cases,
                                            std::uint64_t seed,
                                            ScoringRule rule = ScoringRule::Logarithmic);

// Probability of H1 given the score only; the default inner function.
double csslr_posterior(const CaseRecord& c, const WorldConfig& world);

struct TotalExpectationOptions {
    // P(H1 | delta) used inside the log on both sides.
    std::function<double(const CaseRecord&, const WorldConfig&)> inner = csslr_posterior;
    // Evaluate both sides on one sample instead of two independent ones.
    bool shared_samples = false;
};

struct TotalExpectationResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double gap_in_se = 0.0;
};

// LHS: E[ sum_a P(H_a | delta) log2 P(H_a | delta) ]
// RHS: E[ sum_a P(H_a | delta, y) log2 P(H_a | delta) ]
// Equal by the law of total expectation.
TotalExpectationResult total_expectation_check(const WorldConfig& world, std::size_t n_samples,
                                               std::uint64_t seed,
                                               const TotalExpectationOptions& opts = {});

// Runs body(i) for i in [0, n) over `threads` workers (0 = hardware
// concurrency). The first exception by index is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace lrbench::harness

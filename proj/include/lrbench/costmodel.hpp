#pragma once

// Experimental-demand accounting for the LR system classes, and the LR
// tail-bound check behind the "1000 H2 scores for LR = 1000" rule of thumb.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrbench/genmodel.hpp"
#include "lrbench/lrsys.hpp"

namespace lrbench::costmodel {

using genmodel::WorldConfig;
using lrsys::SystemId;

// A measurement count that is either a number or a symbolic magnitude
// such as "large".
struct Count {
    std::optional<long long> value;
    std::string symbol;

    static Count of(long long v) { return {v, {}}; }
    static Count symbolic(std::string s) { return {std::nullopt, std::move(s)}; }
    bool is_symbolic() const { return !value.has_value(); }
    std::string str() const { return value ? std::to_string(*value) : symbol; }
    bool operator==(const Count&) const = default;
};

// A named quantity quoted for one system, e.g. "shortcut_h1_comparisons".
struct DemandDetail {
    std::string name;
    Count count;
};

struct DemandProfile {
    SystemId system = SystemId::PriorOnly;
    Count per_case_source_measurements;
    Count per_case_trace_measurements;
    Count reusable_background_measurements;
    bool reusable = false;
    std::vector<char> info_loss_dims;  // subset of {'R', 'X', 'Y'}, sorted
    std::string feasibility_note;
    std::vector<DemandDetail> details;

    const Count& detail(const std::string& name) const;
};

// H1 / H2 score counts needed to support LRs down to lr_min and up to
// lr_max: ceil(1 / lr_min) and ceil(lr_max).
long long required_h1_scores(double lr_min);
long long required_h2_scores(double lr_max);

// Profiles for the eight system classes. Counts are scaled from the
// [1/100, 1000] reference range by the H1 factor n_h1 / 100 and the H2
// factor n_h2 / 1000. Throws ConfigError unless 0 < lr_min < 1 < lr_max.
std::vector<DemandProfile> demand_table(double target_lr_min = 0.01, double target_lr_max = 1000.0);

struct TradeoffRow {
    SystemId system = SystemId::PriorOnly;
    int performance_rank = 0;  // 1 = best
    int demand_rank = 0;       // 1 = least demanding
    bool infeasible = false;
    bool favourable = false;
    std::vector<char> info_loss_dims;
    std::string note;
};

// Performance rank is 1 + the length of the longest chain of ranking
// claims above the system; systems tied in demand share a rank.
std::vector<TradeoffRow> feasibility_rank();

struct TailBoundRow {
    double k = 1.0;
    double h2_exceedance = 0.0;  // P(LR > k | H2)
    double h1_exceedance = 0.0;  // P(LR < 1/k | H1)
    double bound = 1.0;          // 1/k + 3 binomial SE at p = 1/k
    bool h2_pass = true;
    bool h1_pass = true;
    bool pass() const { return h2_pass && h1_pass; }
};

// Simulates n_cases H2 cases and n_cases H1 cases from `world` and checks
// both tail frequencies of the system's LR. `model_world`, if given, is
// the world the system uses for its densities.
std::vector<TailBoundRow> tail_bound_check(SystemId system, const WorldConfig& world,
                                           std::size_t n_cases, const std::vector<double>& k_values,
                                           std::uint64_t seed,
                                           const std::optional<WorldConfig>& model_world = std::nullopt);

std::string demand_csv(const std::vector<DemandProfile>& profiles);
std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);

std::string info_loss_string(const std::vector<char>& dims);

}  // namespace lrbench::costmodel

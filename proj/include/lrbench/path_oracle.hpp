#pragma once

// Monte Carlo path oracle. Each system's numerator and denominator are
// estimated by literally running the sampling paths of its model (draw
// sources, draw measurements, keep the paths that reproduce the evidence)
// and counting how often the evidence comes out. The result is an
// independent check on the closed forms in lrsys.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lrbench/genmodel.hpp"
#include "lrbench/lrsys.hpp"
#include "lrbench/random.hpp"

namespace lrbench::oracle {

using genmodel::CaseRecord;
using genmodel::WorldConfig;
using lrsys::SystemId;

struct PathOracleConfig {
    std::size_t n_paths = 100000;      // per term
    double bin_width = 0.05;           // side of the square evidence bin (feature systems)
    double anchor_tolerance = 0.02;    // half-width of the anchor acceptance window
    double bandwidth_scale = 1.0;      // multiplier on Silverman's bandwidth
    int bootstrap_replicates = 200;
    std::size_t n_batches = 1000;      // contiguous path batches resampled by the bootstrap
    std::size_t min_accepted = 50;
};

void validate(const PathOracleConfig& cfg);

struct OracleEstimate {
    double lr = 1.0;
    double log10_lr = 0.0;
    double log10_se = 0.0;               // bootstrap SE of log10_lr
    std::size_t accepted_numerator = 0;  // paths supporting the numerator density
    std::size_t accepted_denominator = 0;
};

// Throws InsufficientPathsError when either term keeps fewer than
// cfg.min_accepted paths, ConfigError for PriorOnly or a bad config.
OracleEstimate path_oracle_estimate(SystemId system, const CaseRecord& c, const WorldConfig& world,
                                    const PathOracleConfig& cfg, Rng& rng);

double path_oracle_lr(SystemId system, const CaseRecord& c, const WorldConfig& world,
                      const PathOracleConfig& cfg, Rng& rng);

// Fixed evidence grid used for closed-form vs oracle comparisons.
inline constexpr double kGridTheta = 0.3;
inline constexpr double kGridX[3] = {-0.2, 0.4, 1.0};
inline constexpr double kGridY[3] = {-0.1, 0.3, 0.7};

struct GridComparison {
    SystemId system = SystemId::PriorOnly;
    double x = 0.0;
    double y = 0.0;
    double closed_form_log10 = 0.0;
    OracleEstimate oracle;

    double abs_diff() const;
    // |difference| in units of the oracle's bootstrap SE.
    double diff_in_se() const;
};

// Every system in `systems` at every grid point (x, y are the summarized
// means), with r = kGridTheta. Streams are derived from `seed`, one per
// (system, point), so the result does not depend on evaluation order.
std::vector<GridComparison> path_oracle_grid(const std::vector<SystemId>& systems,
                                             const WorldConfig& world, const PathOracleConfig& cfg,
                                             std::uint64_t seed);

}  // namespace lrbench::oracle

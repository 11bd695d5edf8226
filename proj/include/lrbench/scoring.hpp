#pragma once

// Scoring rules for probabilistic forecasts of H1 vs H2, in reward
// orientation (higher is better).

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "lrbench/genmodel.hpp"

namespace lrbench::scoring {

using genmodel::Hypothesis;

enum class ScoringRule { Logarithmic, Brier, ImproperTable3 };

std::string_view to_string(ScoringRule rule);
// Accepts the full names and the short CLI forms "log" / "brier".
ScoringRule rule_from_string(std::string_view name);

// The rain-forecast rule: row k is stated P(rain) = k / 10.
struct Table3Row {
    double p_rain;
    double score_rain;
    double score_no_rain;
};

inline constexpr std::array<Table3Row, 11> kTable3 = {{
    {0.0, 0.00, 3.00},
    {0.1, 1.00, 1.95},
    {0.2, 1.30, 1.90},
    {0.3, 1.48, 1.85},
    {0.4, 1.60, 1.78},
    {0.5, 1.70, 1.70},
    {0.6, 1.78, 1.60},
    {0.7, 1.85, 1.48},
    {0.8, 1.90, 1.30},
    {0.9, 1.95, 1.00},
    {1.0, 3.00, 0.00},
}};

// Logarithmic: log2 of the probability given to the realized hypothesis,
// -infinity if that probability is 0. Brier: -2 (1 - q)^2.
// ImproperTable3: stated_p_h1 is rounded to the 0.1 grid, H1 = rain.
// Throws ConfigError if stated_p_h1 is outside [0, 1].
double score(ScoringRule rule, double stated_p_h1, Hypothesis realized);

// Expected score under the believed probability. Zero-weight
// outcomes contribute nothing, so a -infinity score on an outcome believed
// impossible does not poison the sum.
double expected_score(ScoringRule rule, double stated_p_h1, double believed_p_h1);

struct HonestyViolation {
    double believed = 0.0;
    double stated = 0.0;
    double expected_honest = 0.0;
    double expected_stated = 0.0;
};

struct HonestyResult {
    bool is_honest = true;
    std::vector<HonestyViolation> counterexamples;
};

// For every interior believed p on the grid, every stated q != p on the
// full grid [0, 1] must score strictly below stating p.
HonestyResult honesty_check(ScoringRule rule, double grid_step);

struct ScoredRecord {
    double stated_p_h1 = 0.5;
    Hypothesis realized = Hypothesis::H1;
};

struct MeanScore {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;           // finite scores averaged
    std::size_t n_neg_inf = 0;   // excluded, reported separately
};

MeanScore mean_score(ScoringRule rule, const std::vector<ScoredRecord>& records);

// Mean and standard error of a sample.
struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
};
SampleStats sample_stats(const std::vector<double>& values);

struct CalibrationReport {
    std::vector<double> bin_edges;           // n_bins + 1 edges on [0, 1]
    std::vector<std::size_t> bin_counts;
    std::vector<double> bin_mean_stated;     // NaN for empty bins
    std::vector<double> bin_empirical_freq;  // NaN for empty bins
    std::vector<double> bin_se;              // binomial SE at the mean stated p
    std::vector<bool> bin_assessed;          // count >= min_count
    std::size_t min_count = 50;
    double max_abs_gap = 0.0;                // over assessed bins

    // Every assessed bin has |mean stated - empirical| < z * bin_se.
    bool passes(double z = 3.0) const;
};

// Equal-width bins on stated P(H1); the last bin is closed at 1.
CalibrationReport calibration_report(const std::vector<ScoredRecord>& records, int n_bins = 10,
                                     std::size_t min_count = 50);

}  // namespace lrbench::scoring

#include "lrbench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrbench/errors.hpp"

namespace lrbench::scoring {

std::string_view to_string(ScoringRule rule) {
    switch (rule) {
        case ScoringRule::Logarithmic: return "Logarithmic";
        case ScoringRule::Brier: return "Brier";
        case ScoringRule::ImproperTable3: return "ImproperTable3";
    }
    return "?";
}

ScoringRule rule_from_string(std::string_view name) {
    if (name == "Logarithmic" || name == "log") return ScoringRule::Logarithmic;
    if (name == "Brier" || name == "brier") return ScoringRule::Brier;
    if (name == "ImproperTable3") return ScoringRule::ImproperTable3;
    throw ConfigError("unknown scoring rule \"" + std::string(name) + "\"");
}

double score(ScoringRule rule, double stated_p_h1, Hypothesis realized) {
    if (!(stated_p_h1 >= 0.0 && stated_p_h1 <= 1.0)) {
        throw ConfigError("stated probability must lie in [0, 1]");
    }
    const double q = realized == Hypothesis::H1 ? stated_p_h1 : 1.0 - stated_p_h1;
    switch (rule) {
        case ScoringRule::Logarithmic:
            return q > 0.0 ? std::log2(q) : -std::numeric_limits<double>::infinity();
        case ScoringRule::Brier: return -2.0 * (1.0 - q) * (1.0 - q);
        case ScoringRule::ImproperTable3: {
            const auto& row = kTable3[static_cast<std::size_t>(std::lround(stated_p_h1 * 10.0))];
            return realized == Hypothesis::H1 ? row.score_rain : row.score_no_rain;
        }
    }
    return 0.0;
}

double expected_score(ScoringRule rule, double stated_p_h1, double believed_p_h1) {
    if (!(believed_p_h1 >= 0.0 && believed_p_h1 <= 1.0)) {
        throw ConfigError("believed probability must lie in [0, 1]");
    }
    double e = 0.0;
    if (believed_p_h1 > 0.0) e += believed_p_h1 * score(rule, stated_p_h1, Hypothesis::H1);
    if (believed_p_h1 < 1.0) e += (1.0 - believed_p_h1) * score(rule, stated_p_h1, Hypothesis::H2);
    return e;
}

HonestyResult honesty_check(ScoringRule rule, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.1)) {
        throw ConfigError("honesty_check: grid_step must lie in (0, 0.1]");
    }
    const auto n = static_cast<int>(std::lround(1.0 / grid_step));
    std::vector<double> grid;
    for (int k = 0; k <= n; ++k) grid.push_back(std::min(1.0, k * grid_step));

    HonestyResult out;
    for (int i = 1; i < n; ++i) {
        const double p = grid[static_cast<std::size_t>(i)];
        const double honest = expected_score(rule, p, p);
        for (int j = 0; j <= n; ++j) {
            if (j == i) continue;
            const double q = grid[static_cast<std::size_t>(j)];
            const double e = expected_score(rule, q, p);
            if (e >= honest) out.counterexamples.push_back({p, q, honest, e});
        }
    }
    out.is_honest = out.counterexamples.empty();
    return out;
}

SampleStats sample_stats(const std::vector<double>& values) {
    SampleStats s;
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / n;
    if (values.size() < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
    return s;
}

MeanScore mean_score(ScoringRule rule, const std::vector<ScoredRecord>& records) {
    if (records.empty()) throw ConfigError("mean_score: no records");
    std::vector<double> finite;
    finite.reserve(records.size());
    MeanScore out;
    for (const auto& r : records) {
        const double s = score(rule, r.stated_p_h1, r.realized);
        if (std::isinf(s) && s < 0.0) {
            ++out.n_neg_inf;
        } else {
            finite.push_back(s);
        }
    }
    out.n = finite.size();
    if (finite.empty()) {
        out.mean = -std::numeric_limits<double>::infinity();
        return out;
    }
    const SampleStats st = sample_stats(finite);
    out.mean = st.mean;
    out.std_error = st.std_error;
    return out;
}

bool CalibrationReport::passes(double z) const {
    for (std::size_t b = 0; b < bin_counts.size(); ++b) {
        if (!bin_assessed[b]) continue;
        const double gap = std::fabs(bin_mean_stated[b] - bin_empirical_freq[b]);
        if (gap != 0.0 && !(gap < z * bin_se[b])) return false;
    }
    return true;
}

CalibrationReport calibration_report(const std::vector<ScoredRecord>& records, int n_bins,
                                     std::size_t min_count) {
    if (n_bins < 2) throw ConfigError("calibration_report: n_bins must be >= 2");
    const auto nb = static_cast<std::size_t>(n_bins);
    CalibrationReport rep;
    rep.min_count = min_count;
    for (std::size_t b = 0; b <= nb; ++b) rep.bin_edges.push_back(static_cast<double>(b) / n_bins);
    rep.bin_counts.assign(nb, 0);
    std::vector<double> sum_p(nb, 0.0);
    std::vector<double> hits(nb, 0.0);
    for (const auto& r : records) {
        if (!(r.stated_p_h1 >= 0.0 && r.stated_p_h1 <= 1.0)) {
            throw ConfigError("calibration_report: stated probability outside [0, 1]");
        }
        auto b = static_cast<std::size_t>(r.stated_p_h1 * n_bins);
        if (b >= nb) b = nb - 1;
        ++rep.bin_counts[b];
        sum_p[b] += r.stated_p_h1;
        if (r.realized == Hypothesis::H1) hits[b] += 1.0;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t b = 0; b < nb; ++b) {
        const auto n = static_cast<double>(rep.bin_counts[b]);
        const bool has = rep.bin_counts[b] > 0;
        const double mean = has ? sum_p[b] / n : nan;
        rep.bin_mean_stated.push_back(mean);
        rep.bin_empirical_freq.push_back(has ? hits[b] / n : nan);
        rep.bin_se.push_back(has ? std::sqrt(mean * (1.0 - mean) / n) : nan);
        const bool assessed = rep.bin_counts[b] >= min_count && has;
        rep.bin_assessed.push_back(assessed);
        if (assessed) {
            rep.max_abs_gap = std::max(rep.max_abs_gap, std::fabs(mean - hits[b] / n));
        }
    }
    return rep;
}

}  // namespace lrbench::scoring

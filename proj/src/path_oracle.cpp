#include "lrbench/path_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "lrbench/errors.hpp"

namespace lrbench::oracle {

namespace {

using genmodel::PopulationModel;
using genmodel::ScoreKind;

constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

// Where a path draws a source from.
struct SourceDraw {
    enum class Mode { Fixed, Population, SameAsTrace } mode = Mode::Fixed;
    double theta = 0.0;
    PopulationModel pop;
};

enum class Matching { Bin, Score, AnchorY, AnchorX };

struct TermModel {
    SourceDraw trace;
    SourceDraw ref;
};

struct SystemModel {
    Matching matching = Matching::Score;
    TermModel numerator;
    TermModel denominator;
};

SourceDraw fixed(double theta) { return {SourceDraw::Mode::Fixed, theta, {}}; }
SourceDraw from(const PopulationModel& p) { return {SourceDraw::Mode::Population, 0.0, p}; }
SourceDraw shared() { return {SourceDraw::Mode::SameAsTrace, 0.0, {}}; }

SystemModel model_for(SystemId id, double theta, const WorldConfig& w) {
    // Specific source: the reference source is r itself; under H2 the
    // trace comes from a fresh t ~ T. Common source: under H1 both come
    // from one r ~ C, under H2 from t ~ T and r ~ D.
    const TermModel ss_num{fixed(theta), fixed(theta)};
    const TermModel ss_den{from(w.popT), fixed(theta)};
    const TermModel cs_num{from(w.popC), shared()};
    const TermModel cs_den{from(w.popT), from(w.popD)};
    switch (id) {
        case SystemId::SSFLR: return {Matching::Bin, ss_num, ss_den};
        case SystemId::CSFLR: return {Matching::Bin, cs_num, cs_den};
        case SystemId::SSSLR: return {Matching::Score, ss_num, ss_den};
        case SystemId::CSSLR: return {Matching::Score, cs_num, cs_den};
        case SystemId::SSYASLR: return {Matching::AnchorY, ss_num, ss_den};
        case SystemId::CSYASLR: return {Matching::AnchorY, cs_num, cs_den};
        case SystemId::SSXASLR: return {Matching::AnchorX, ss_num, ss_den};
        case SystemId::CSXASLR: return {Matching::AnchorX, cs_num, cs_den};
        case SystemId::PriorOnly: break;
    }
    throw ConfigError("path oracle: PriorOnly has no sampling paths");
}

class PathSampler {
public:
    PathSampler(const WorldConfig& w, Rng& rng) : w_(w), rng_(rng) {}

    double source(const SourceDraw& d, double trace_theta) {
        switch (d.mode) {
            case SourceDraw::Mode::Fixed: return d.theta;
            case SourceDraw::Mode::Population: return d.pop.mu + d.pop.tau * z_(rng_);
            case SourceDraw::Mode::SameAsTrace: return trace_theta;
        }
        return d.theta;
    }

    // Mean of n measurements on a source with mean theta.
    double measure(double theta, int n) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += theta + w_.noise.sigma * z_(rng_);
        return sum / n;
    }

private:
    const WorldConfig& w_;
    Rng& rng_;
    std::normal_distribution<double> z_{0.0, 1.0};
};

struct BatchSums {
    std::vector<double> s;
    std::vector<double> a;
};

struct TermResult {
    double density = 0.0;
    std::size_t support = 0;  // paths in the bin, or kept paths near the score
    BatchSums batches;
    double norm = 1.0;
};

std::size_t batch_of(std::size_t i, std::size_t n, std::size_t n_batches) {
    return i * n_batches / n;
}

double silverman_bandwidth(std::vector<double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : v) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    auto quantile = [&](double q) {
        const auto k = static_cast<std::size_t>(q * (n - 1.0));
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
        return v[k];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(n, -0.2);
}

TermResult run_term(const TermModel& term, Matching matching, double x_obs, double y_obs,
                    const WorldConfig& w, const PathOracleConfig& cfg, Rng& rng,
                    const char* label) {
    PathSampler sampler(w, rng);
    const std::size_t n = cfg.n_paths;
    const std::size_t nb = std::min(cfg.n_batches, n);
    const ScoreKind kind = w.score_kind;
    TermResult out;
    out.batches.s.assign(nb, 0.0);
    out.batches.a.assign(nb, 0.0);

    if (matching == Matching::Bin) {
        const double half = 0.5 * cfg.bin_width;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = sampler.source(term.trace, 0.0);
            const double r = sampler.source(term.ref, t);
            const double x = sampler.measure(t, w.n_trace);
            const double y = sampler.measure(r, w.n_ref);
            const std::size_t b = batch_of(i, n, nb);
            out.batches.a[b] += 1.0;
            if (std::fabs(x - x_obs) <= half && std::fabs(y - y_obs) <= half) {
                out.batches.s[b] += 1.0;
                ++out.support;
            }
        }
        if (out.support < cfg.min_accepted) {
            throw InsufficientPathsError(std::string(label) + ": " + std::to_string(out.support) +
                                         " paths fell in the evidence bin");
        }
        out.norm = cfg.bin_width * cfg.bin_width;
        out.density = static_cast<double>(out.support) / static_cast<double>(n) / out.norm;
        return out;
    }

    // Score-based terms: collect the scores of kept paths, then smooth.
    const double delta_obs = lrsys::score_value(x_obs, y_obs, kind);
    std::vector<double> scores;
    std::vector<std::uint32_t> batch;
    scores.reserve(matching == Matching::Score ? n : n / 16);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = sampler.source(term.trace, 0.0);
        const double r = sampler.source(term.ref, t);
        const std::size_t b = batch_of(i, n, nb);
        double delta = 0.0;
        if (matching == Matching::AnchorY) {
            const double y = sampler.measure(r, w.n_ref);
            if (!(std::fabs(y - y_obs) < cfg.anchor_tolerance)) continue;
            delta = lrsys::score_value(sampler.measure(t, w.n_trace), y_obs, kind);
        } else if (matching == Matching::AnchorX) {
            const double x = sampler.measure(t, w.n_trace);
            if (!(std::fabs(x - x_obs) < cfg.anchor_tolerance)) continue;
            delta = lrsys::score_value(x_obs, sampler.measure(r, w.n_ref), kind);
        } else {
            const double x = sampler.measure(t, w.n_trace);
            const double y = sampler.measure(r, w.n_ref);
            delta = lrsys::score_value(x, y, kind);
        }
        scores.push_back(delta);
        batch.push_back(static_cast<std::uint32_t>(b));
        out.batches.a[b] += 1.0;
    }
    if (scores.size() < cfg.min_accepted) {
        throw InsufficientPathsError(std::string(label) + ": only " +
                                     std::to_string(scores.size()) +
                                     " paths passed the anchor window");
    }

    const double h = cfg.bandwidth_scale * silverman_bandwidth(scores);
    if (!(h > 0.0)) throw InsufficientPathsError(std::string(label) + ": degenerate kernel bandwidth");
    const bool reflect = kind == ScoreKind::AbsoluteDifference;
    double total = 0.0;
    std::size_t local = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double u = (scores[i] - delta_obs) / h;
        double k = std::exp(-0.5 * u * u);
        if (reflect) {
            const double v = (scores[i] + delta_obs) / h;
            k += std::exp(-0.5 * v * v);
        }
        if (std::fabs(u) <= 2.0) ++local;
        out.batches.s[batch[i]] += k;
        total += k;
    }
    if (local < cfg.min_accepted) {
        throw InsufficientPathsError(std::string(label) + ": " + std::to_string(local) +
                                     " kept scores within two bandwidths of the evidence");
    }
    out.support = local;
    out.norm = h / kInvSqrtTwoPi;
    out.density = total / static_cast<double>(scores.size()) / out.norm;
    return out;
}

double ratio_of(const BatchSums& b, const std::vector<std::size_t>& pick) {
    double s = 0.0;
    double a = 0.0;
    for (std::size_t k : pick) {
        s += b.s[k];
        a += b.a[k];
    }
    return a > 0.0 ? s / a : 0.0;
}

double bootstrap_log10_se(const TermResult& num, const TermResult& den, int replicates, Rng& rng) {
    const std::size_t nb_num = num.batches.s.size();
    const std::size_t nb_den = den.batches.s.size();
    std::uniform_int_distribution<std::size_t> pick_num(0, nb_num - 1);
    std::uniform_int_distribution<std::size_t> pick_den(0, nb_den - 1);
    std::vector<std::size_t> idx_num(nb_num);
    std::vector<std::size_t> idx_den(nb_den);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(replicates));
    for (int rep = 0; rep < replicates; ++rep) {
        for (auto& k : idx_num) k = pick_num(rng);
        for (auto& k : idx_den) k = pick_den(rng);
        const double rn = ratio_of(num.batches, idx_num) / num.norm;
        const double rd = ratio_of(den.batches, idx_den) / den.norm;
        const double v = std::log10(rn) - std::log10(rd);
        if (std::isfinite(v)) values.push_back(v);
    }
    if (values.size() < 2) return INFINITY;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

void validate(const PathOracleConfig& cfg) {
    if (cfg.n_paths < 1000) throw ConfigError("oracle.n_paths must be >= 1000");
    if (!(cfg.bin_width > 0.0) || !std::isfinite(cfg.bin_width)) {
        throw ConfigError("oracle.bin_width must be > 0");
    }
    if (!(cfg.anchor_tolerance > 0.0) || !std::isfinite(cfg.anchor_tolerance)) {
        throw ConfigError("oracle.anchor_tolerance must be > 0");
    }
    if (!(cfg.bandwidth_scale > 0.0) || !std::isfinite(cfg.bandwidth_scale)) {
        throw ConfigError("oracle.bandwidth_scale must be > 0");
    }
    if (cfg.bootstrap_replicates < 2) throw ConfigError("oracle.bootstrap_replicates must be >= 2");
    if (cfg.n_batches < 2) throw ConfigError("oracle.n_batches must be >= 2");
    if (cfg.min_accepted < 1) throw ConfigError("oracle.min_accepted must be >= 1");
}

OracleEstimate path_oracle_estimate(SystemId system, const CaseRecord& c, const WorldConfig& world,
                                    const PathOracleConfig& cfg, Rng& rng) {
    validate(cfg);
    const SystemModel model = model_for(system, c.r.theta, world);
    const lrsys::Evidence e = lrsys::summarize(c);

    // Independent sub-streams so the numerator draws do not shift the
    // denominator's.
    Rng num_rng(rng());
    Rng den_rng(rng());
    Rng boot_rng(rng());
    const TermResult num =
        run_term(model.numerator, model.matching, e.x, e.y, world, cfg, num_rng, "numerator");
    const TermResult den =
        run_term(model.denominator, model.matching, e.x, e.y, world, cfg, den_rng, "denominator");

    OracleEstimate out;
    out.lr = num.density / den.density;
    out.log10_lr = std::log10(num.density) - std::log10(den.density);
    out.log10_se = bootstrap_log10_se(num, den, cfg.bootstrap_replicates, boot_rng);
    out.accepted_numerator = num.support;
    out.accepted_denominator = den.support;
    return out;
}

double path_oracle_lr(SystemId system, const CaseRecord& c, const WorldConfig& world,
                      const PathOracleConfig& cfg, Rng& rng) {
    return path_oracle_estimate(system, c, world, cfg, rng).lr;
}

double GridComparison::abs_diff() const { return std::fabs(closed_form_log10 - oracle.log10_lr); }

double GridComparison::diff_in_se() const {
    return oracle.log10_se > 0.0 ? abs_diff() / oracle.log10_se : INFINITY;
}

std::vector<GridComparison> path_oracle_grid(const std::vector<SystemId>& systems,
                                             const WorldConfig& world, const PathOracleConfig& cfg,
                                             std::uint64_t seed) {
    std::vector<GridComparison> out;
    for (SystemId id : systems) {
        // Stream keyed by (system, point), not by position in `systems`.
        std::uint64_t index = static_cast<std::uint64_t>(id) * 9;
        for (double x : kGridX) {
            for (double y : kGridY) {
                CaseRecord c;
                c.r.theta = kGridTheta;
                c.trace_source = c.r;
                c.x = {x};
                c.y = {y};
                Rng rng = make_stream(seed, index++, StreamTag::Oracle);
                GridComparison g;
                g.system = id;
                g.x = x;
                g.y = y;
                g.closed_form_log10 = lrsys::evaluate(id, c, world).log10_lr;
                g.oracle = path_oracle_estimate(id, c, world, cfg, rng);
                out.push_back(g);
            }
        }
    }
    return out;
}

}  // namespace lrbench::oracle

#include "lrbench/lrsys.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "lrbench/errors.hpp"
#include "lrbench/gaussian.hpp"

namespace lrbench::lrsys {

namespace {

constexpr double kLn10 = 2.302585092994045684;

void require_finite(std::initializer_list<double> values, std::string_view who) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw EvaluationError(std::string(who) + ": non-finite input");
        }
    }
}

LrResult make_result(SystemId id, double log_lr) {
    LrResult r;
    r.system = id;
    r.log_lr = log_lr;
    r.log10_lr = log_lr / kLn10;
    r.lr = std::clamp(std::exp(log_lr), DBL_MIN, DBL_MAX);
    return r;
}

// Log density of the score when the signed difference x - y ~ N(mean, var).
double log_score_density(double delta, double mean, double var, ScoreKind kind) {
    return kind == ScoreKind::SignedDifference ? gauss::log_pdf(delta, mean, var)
                                               : gauss::log_folded_pdf(delta, mean, var);
}

double sq(double v) { return v * v; }

// Joint log density of (score, anchor) where (x - y, anchor) is bivariate
// normal with the given moments.
double log_joint_density(double delta, double anchor, double mean_d, double mean_a, double var_d,
                         double var_a, double cov, ScoreKind kind) {
    const double pos = gauss::log_pdf2(delta, anchor, mean_d, mean_a, var_d, var_a, cov);
    if (kind == ScoreKind::SignedDifference) return pos;
    return gauss::log_add_exp(pos, gauss::log_pdf2(-delta, anchor, mean_d, mean_a, var_d, var_a, cov));
}

}  // namespace

std::string_view to_string(SystemId id) {
    switch (id) {
        case SystemId::SSFLR: return "SSFLR";
        case SystemId::CSFLR: return "CSFLR";
        case SystemId::SSSLR: return "SSSLR";
        case SystemId::CSSLR: return "CSSLR";
        case SystemId::SSYASLR: return "SSYASLR";
        case SystemId::CSYASLR: return "CSYASLR";
        case SystemId::SSXASLR: return "SSXASLR";
        case SystemId::CSXASLR: return "CSXASLR";
        case SystemId::PriorOnly: return "PriorOnly";
    }
    return "?";
}

SystemId system_from_string(std::string_view name) {
    for (SystemId id : kAllSystems) {
        if (to_string(id) == name) return id;
    }
    throw ConfigError("unknown system \"" + std::string(name) + "\"");
}

bool is_specific_source(SystemId id) {
    return id == SystemId::SSFLR || id == SystemId::SSSLR || id == SystemId::SSYASLR ||
           id == SystemId::SSXASLR;
}

bool is_feature_based(SystemId id) { return id == SystemId::SSFLR || id == SystemId::CSFLR; }

std::optional<AnchorKind> anchor_of(SystemId id) {
    switch (id) {
        case SystemId::SSYASLR:
        case SystemId::CSYASLR: return AnchorKind::Y;
        case SystemId::SSXASLR:
        case SystemId::CSXASLR: return AnchorKind::X;
        default: return std::nullopt;
    }
}

Evidence summarize(const CaseRecord& c) {
    if (c.x.empty() || c.y.empty()) {
        throw EvaluationError("case needs at least one trace and one reference measurement");
    }
    const double x = std::accumulate(c.x.begin(), c.x.end(), 0.0) / static_cast<double>(c.x.size());
    const double y = std::accumulate(c.y.begin(), c.y.end(), 0.0) / static_cast<double>(c.y.size());
    return {x, y};
}

CommonSourceView common_view(const CaseRecord& c) { return {summarize(c)}; }

SpecificSourceView specific_view(const CaseRecord& c) { return {summarize(c), c.r}; }

double score_value(double x, double y, ScoreKind kind) {
    const double d = x - y;
    return kind == ScoreKind::SignedDifference ? d : std::fabs(d);
}

Score compute_score(const CaseRecord& c, ScoreKind kind) {
    const Evidence e = summarize(c);
    return {score_value(e.x, e.y, kind)};
}

LrResult ssflr(const SpecificSourceView& v, const WorldConfig& w) {
    const auto [x, y] = v.evidence;
    const double theta = v.r.theta;
    require_finite({x, y, theta}, "SSFLR");
    // The reference factor N(y; theta, vr) is common to both terms.
    const double vt = w.trace_var();
    const double num = gauss::log_pdf(x, theta, vt);
    const double den = gauss::log_pdf(x, w.popT.mu, vt + sq(w.popT.tau));
    return make_result(SystemId::SSFLR, num - den);
}

LrResult csflr(const CommonSourceView& v, const WorldConfig& w) {
    const auto [x, y] = v.evidence;
    require_finite({x, y}, "CSFLR");
    const double vt = w.trace_var();
    const double vr = w.ref_var();
    const double tc2 = sq(w.popC.tau);
    const double num =
        gauss::log_pdf2(x, y, w.popC.mu, w.popC.mu, vt + tc2, vr + tc2, tc2);
    const double den = gauss::log_pdf(x, w.popT.mu, vt + sq(w.popT.tau)) +
                       gauss::log_pdf(y, w.popD.mu, vr + sq(w.popD.tau));
    return make_result(SystemId::CSFLR, num - den);
}

LrResult ssslr(const SpecificSourceView& v, const WorldConfig& w) {
    const auto [x, y] = v.evidence;
    const double theta = v.r.theta;
    require_finite({x, y, theta}, "SSSLR");
    const double delta = score_value(x, y, w.score_kind);
    const double base = w.trace_var() + w.ref_var();
    const double num = log_score_density(delta, 0.0, base, w.score_kind);
    const double den =
        log_score_density(delta, w.popT.mu - theta, base + sq(w.popT.tau), w.score_kind);
    return make_result(SystemId::SSSLR, num - den);
}

LrResult csslr_from_score(Score s, const WorldConfig& w) {
    require_finite({s.delta}, "CSSLR");
    const double base = w.trace_var() + w.ref_var();
    const double num = log_score_density(s.delta, 0.0, base, w.score_kind);
    const double den = log_score_density(s.delta, w.popT.mu - w.popD.mu,
                                         base + sq(w.popT.tau) + sq(w.popD.tau), w.score_kind);
    return make_result(SystemId::CSSLR, num - den);
}

LrResult csslr(const CommonSourceView& v, const WorldConfig& w) {
    require_finite({v.evidence.x, v.evidence.y}, "CSSLR");
    return csslr_from_score({score_value(v.evidence.x, v.evidence.y, w.score_kind)}, w);
}

LrResult ssyaslr(const SpecificSourceView& v, const WorldConfig& w) {
    const auto [x, y] = v.evidence;
    const double theta = v.r.theta;
    require_finite({x, y, theta}, "SSYASLR");
    const double delta = score_value(x, y, w.score_kind);
    const double vt = w.trace_var();
    const double num = log_score_density(delta, theta - y, vt, w.score_kind);
    const double den = log_score_density(delta, w.popT.mu - y, vt + sq(w.popT.tau), w.score_kind);
    return make_result(SystemId::SSYASLR, num - den);
}

LrResult csyaslr(const CommonSourceView& v, const WorldConfig& w) {
    const auto [x, y] = v.evidence;
    require_finite({x, y}, "CSYASLR");
    const double delta = score_value(x, y, w.score_kind);
    const double vt = w.trace_var();
    const double vr = w.ref_var();
    const double tc2 = sq(w.popC.tau);
    // Posterior of the reference source mean given y under popC.
    const double m = (tc2 * y + vr * w.popC.mu) / (tc2 + vr);
    const double var_post = tc2 * vr / (tc2 + vr);
    const double num = log_score_density(delta, m - y, vt + var_post, w.score_kind);
    const double den = log_score_density(delta, w.popT.mu - y, vt + sq(w.popT.tau), w.score_kind);
    return make_result(SystemId::CSYASLR, num - den);
}

LrResult ssxaslr(const SpecificSourceView& v, const WorldConfig&) {
    (void)v;
    return make_result(SystemId::SSXASLR, 0.0);
}

LrResult csxaslr(const CommonSourceView& v, const WorldConfig& w) {
    const auto [x, y] = v.evidence;
    require_finite({x, y}, "CSXASLR");
    const double delta = score_value(x, y, w.score_kind);
    const double vt = w.trace_var();
    const double vr = w.ref_var();
    const double tc2 = sq(w.popC.tau);
    // Posterior of the common source mean given x under popC.
    const double m = (tc2 * x + vt * w.popC.mu) / (tc2 + vt);
    const double var_post = tc2 * vt / (tc2 + vt);
    const double num = log_score_density(delta, x - m, vr + var_post, w.score_kind);
    const double den = log_score_density(delta, x - w.popD.mu, vr + sq(w.popD.tau), w.score_kind);
    return make_result(SystemId::CSXASLR, num - den);
}

LrResult evaluate(SystemId id, const CaseRecord& c, const WorldConfig& w) {
    switch (id) {
        case SystemId::SSFLR: return ssflr(specific_view(c), w);
        case SystemId::CSFLR: return csflr(common_view(c), w);
        case SystemId::SSSLR: return ssslr(specific_view(c), w);
        case SystemId::CSSLR: return csslr(common_view(c), w);
        case SystemId::SSYASLR: return ssyaslr(specific_view(c), w);
        case SystemId::CSYASLR: return csyaslr(common_view(c), w);
        case SystemId::SSXASLR: return ssxaslr(specific_view(c), w);
        case SystemId::CSXASLR: return csxaslr(common_view(c), w);
        case SystemId::PriorOnly: return make_result(SystemId::PriorOnly, 0.0);
    }
    throw EvaluationError("unknown system");
}

double log_anchor_lr(double a, AnchorKind kind, const WorldConfig& w) {
    if (kind == AnchorKind::Y) {
        const double vr = w.ref_var();
        return gauss::log_pdf(a, w.popC.mu, vr + sq(w.popC.tau)) -
               gauss::log_pdf(a, w.popD.mu, vr + sq(w.popD.tau));
    }
    const double vt = w.trace_var();
    return gauss::log_pdf(a, w.popC.mu, vt + sq(w.popC.tau)) -
           gauss::log_pdf(a, w.popT.mu, vt + sq(w.popT.tau));
}

double anchor_lr(double a, AnchorKind kind, const WorldConfig& w) {
    return std::exp(log_anchor_lr(a, kind, w));
}

double log_specific_anchor_lr(double a, AnchorKind kind, const SourceParams& r,
                              const WorldConfig& w) {
    if (kind == AnchorKind::Y) return 0.0;
    const double vt = w.trace_var();
    return gauss::log_pdf(a, r.theta, vt) - gauss::log_pdf(a, w.popT.mu, vt + sq(w.popT.tau));
}

double log_joint_lr(double delta, double a, AnchorKind kind, const WorldConfig& w) {
    const double vt = w.trace_var();
    const double vr = w.ref_var();
    const double tc2 = sq(w.popC.tau);
    const double td2 = sq(w.popD.tau);
    const double tt2 = sq(w.popT.tau);
    const ScoreKind sk = w.score_kind;
    // H1: x, y share r ~ C. H2: x from T, y from D, independent.
    const double var_d1 = vt + vr;
    const double var_d2 = vt + tt2 + vr + td2;
    const double mean_d2 = w.popT.mu - w.popD.mu;
    if (kind == AnchorKind::Y) {
        const double h1 = log_joint_density(delta, a, 0.0, w.popC.mu, var_d1, vr + tc2, -vr, sk);
        const double h2 =
            log_joint_density(delta, a, mean_d2, w.popD.mu, var_d2, vr + td2, -(vr + td2), sk);
        return h1 - h2;
    }
    const double h1 = log_joint_density(delta, a, 0.0, w.popC.mu, var_d1, vt + tc2, vt, sk);
    const double h2 = log_joint_density(delta, a, mean_d2, w.popT.mu, var_d2, vt + tt2, vt + tt2, sk);
    return h1 - h2;
}

double log_joint_lr_specific(double delta, double a, AnchorKind kind, const SourceParams& r,
                             const WorldConfig& w) {
    const double vt = w.trace_var();
    const double vr = w.ref_var();
    const double tt2 = sq(w.popT.tau);
    const ScoreKind sk = w.score_kind;
    const double var_d1 = vt + vr;
    const double var_d2 = vt + tt2 + vr;
    const double mean_d2 = w.popT.mu - r.theta;
    if (kind == AnchorKind::Y) {
        const double h1 = log_joint_density(delta, a, 0.0, r.theta, var_d1, vr, -vr, sk);
        const double h2 = log_joint_density(delta, a, mean_d2, r.theta, var_d2, vr, -vr, sk);
        return h1 - h2;
    }
    const double h1 = log_joint_density(delta, a, 0.0, r.theta, var_d1, vt, vt, sk);
    const double h2 = log_joint_density(delta, a, mean_d2, w.popT.mu, var_d2, vt + tt2, vt + tt2, sk);
    return h1 - h2;
}

double log_conditioning_term(SystemId id, const CaseRecord& c, const WorldConfig& w) {
    if (id == SystemId::CSYASLR) return log_anchor_lr(summarize(c).y, AnchorKind::Y, w);
    if (id == SystemId::CSXASLR) return log_anchor_lr(summarize(c).x, AnchorKind::X, w);
    return 0.0;
}

double posterior_from_lr(double lr, double prior_h1) {
    if (!(lr > 0.0)) throw EvaluationError("posterior_from_lr: lr must be > 0");
    return lr * prior_h1 / (lr * prior_h1 + (1.0 - prior_h1));
}

double posterior_from_log_lr(double log_lr, double prior_h1) {
    // Logistic of the posterior log-odds; stable for large |log_lr|.
    const double log_odds = log_lr + std::log(prior_h1) - std::log1p(-prior_h1);
    if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
    const double e = std::exp(log_odds);
    return e / (1.0 + e);
}

ClampedLogLr clamp_log_lr(double log_lr) {
    static const double lo = std::log(kLrFloor);
    static const double hi = std::log(kLrCeil);
    if (std::isnan(log_lr)) throw EvaluationError("log LR is NaN");
    if (log_lr < lo) return {lo, true};
    if (log_lr > hi) return {hi, true};
    return {log_lr, false};
}

DiscreteProfileLr discrete_profile_lr(const DiscreteProfileCase& c, ProfileApproach approach) {
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) {
        throw ConfigError("discrete profile: gamma must lie strictly inside (0, 1)");
    }
    DiscreteProfileLr out;
    // P(trace profile | reference profile, H1) = 1 vs gamma under H2.
    out.match_numerator = 1.0;
    out.match_denominator = c.gamma;
    if (approach == ProfileApproach::SpecificSource) {
        // The known reference shows its profile with certainty.
        out.rarity_numerator = 1.0;
        out.rarity_denominator = 1.0;
    } else {
        // The reference is a random draw from the population.
        out.rarity_numerator = c.gamma;
        out.rarity_denominator = c.gamma;
    }
    out.term_match = out.match_numerator / out.match_denominator;
    out.term_rarity = out.rarity_numerator / out.rarity_denominator;
    out.lr = out.term_match * out.term_rarity;
    return out;
}

}  // namespace lrbench::lrsys

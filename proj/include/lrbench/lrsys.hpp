#pragma once

// Closed-form likelihood ratios for the eight source-level LR system
// classes over the hierarchical-Gaussian world.
//
// Naming: SS/CS = specific/common source, F/S = feature/score based,
// YA/XA = anchored on the reference (y) or trace (x) measurement.
//
// Specific-source evaluators take a SpecificSourceView, which carries the
// reference source parameters r. Common-source evaluators take a
// CommonSourceView, which has no field for r, so an evaluator cannot
// peek at information its model does not condition on.

#include <array>
#include <optional>
#include <string_view>

#include "lrbench/genmodel.hpp"

namespace lrbench::lrsys {

using genmodel::CaseRecord;
using genmodel::ScoreKind;
using genmodel::SourceParams;
using genmodel::WorldConfig;

enum class SystemId { SSFLR, CSFLR, SSSLR, CSSLR, SSYASLR, CSYASLR, SSXASLR, CSXASLR, PriorOnly };

inline constexpr std::array<SystemId, 9> kAllSystems = {
    SystemId::SSFLR,   SystemId::CSFLR,   SystemId::SSSLR,   SystemId::CSSLR,    SystemId::SSYASLR,
    SystemId::CSYASLR, SystemId::SSXASLR, SystemId::CSXASLR, SystemId::PriorOnly};

// The seven systems whose LR is not identically 1.
inline constexpr std::array<SystemId, 7> kNontrivialSystems = {
    SystemId::SSFLR,   SystemId::CSFLR,   SystemId::SSSLR,  SystemId::CSSLR,
    SystemId::SSYASLR, SystemId::CSYASLR, SystemId::CSXASLR};

enum class AnchorKind { X, Y };

std::string_view to_string(SystemId id);
SystemId system_from_string(std::string_view name);
bool is_specific_source(SystemId id);
bool is_feature_based(SystemId id);
std::optional<AnchorKind> anchor_of(SystemId id);

struct Score {
    double delta = 0.0;
};

struct LrResult {
    SystemId system = SystemId::PriorOnly;
    double lr = 1.0;        // exp(log_lr), saturated to the positive finite doubles
    double log10_lr = 0.0;
    double log_lr = 0.0;    // natural log; the value all downstream math uses
};

// Per-role means of the case measurements.
struct Evidence {
    double x = 0.0;
    double y = 0.0;
};

struct CommonSourceView {
    Evidence evidence;
};

struct SpecificSourceView {
    Evidence evidence;
    SourceParams r;
};

Evidence summarize(const CaseRecord& c);
CommonSourceView common_view(const CaseRecord& c);
SpecificSourceView specific_view(const CaseRecord& c);

double score_value(double x, double y, ScoreKind kind);
Score compute_score(const CaseRecord& c, ScoreKind kind);

LrResult ssflr(const SpecificSourceView& v, const WorldConfig& w);
LrResult csflr(const CommonSourceView& v, const WorldConfig& w);
LrResult ssslr(const SpecificSourceView& v, const WorldConfig& w);
LrResult csslr(const CommonSourceView& v, const WorldConfig& w);
LrResult ssyaslr(const SpecificSourceView& v, const WorldConfig& w);
LrResult csyaslr(const CommonSourceView& v, const WorldConfig& w);
LrResult ssxaslr(const SpecificSourceView& v, const WorldConfig& w);
LrResult csxaslr(const CommonSourceView& v, const WorldConfig& w);

// CSSLR depends on the evidence only through the score.
LrResult csslr_from_score(Score s, const WorldConfig& w);

// Uniform entry point: builds the view the system is entitled to and
// dispatches. PriorOnly returns LR = 1.
LrResult evaluate(SystemId id, const CaseRecord& c, const WorldConfig& w);

// f(a|H1)/f(a|H2) for the anchor under the common-source sampling models:
// Y uses popC vs popD, X uses popC vs popT.
double anchor_lr(double anchor_value, AnchorKind kind, const WorldConfig& w);
double log_anchor_lr(double anchor_value, AnchorKind kind, const WorldConfig& w);

// Same under the specific-source models with r known. The Y term is 1.
double log_specific_anchor_lr(double anchor_value, AnchorKind kind, const SourceParams& r,
                              const WorldConfig& w);

// f(score, a|H1)/f(score, a|H2) from the bivariate law of (x - y, a).
double log_joint_lr(double delta, double anchor_value, AnchorKind kind, const WorldConfig& w);
double log_joint_lr_specific(double delta, double anchor_value, AnchorKind kind,
                             const SourceParams& r, const WorldConfig& w);

// Log of the anchor term that turns an anchored LR into a properly
// conditioned posterior-odds update. Non-zero only for the common-source
// anchored systems; for every other system the LR alone is the update.
double log_conditioning_term(SystemId id, const CaseRecord& c, const WorldConfig& w);

// Posterior P(H1 | evidence) from an LR and the prior.
double posterior_from_lr(double lr, double prior_h1);
double posterior_from_log_lr(double log_lr, double prior_h1);

// LRs are clamped to [1e-12, 1e12] before posterior conversion.
inline constexpr double kLrFloor = 1e-12;
inline constexpr double kLrCeil = 1e12;

struct ClampedLogLr {
    double log_lr = 0.0;
    bool clamped = false;
};
ClampedLogLr clamp_log_lr(double log_lr);

// Discrete single-source profile shared by trace and reference, with
// population frequency gamma.
struct DiscreteProfileCase {
    double gamma = 0.5;
};

enum class ProfileApproach { SpecificSource, CommonSource };

struct DiscreteProfileLr {
    double match_numerator = 1.0;
    double match_denominator = 1.0;
    double rarity_numerator = 1.0;
    double rarity_denominator = 1.0;
    double term_match = 1.0;
    double term_rarity = 1.0;
    double lr = 1.0;
};

DiscreteProfileLr discrete_profile_lr(const DiscreteProfileCase& c, ProfileApproach approach);

}  // namespace lrbench::lrsys

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "lrbench/costmodel.hpp"
#include "lrbench/harness.hpp"
#include "lrbench/lrsys.hpp"
#include "lrbench/path_oracle.hpp"
#include "lrbench/scoring.hpp"
#include "reference_lr.hpp"

using namespace lrbench;
using lrsys::SystemId;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

genmodel::CaseRecord make_case(double x, double y, double theta) {
    genmodel::CaseRecord c;
    c.r = c.trace_source = {theta};
    c.x = {x};
    c.y = {y};
    return c;
}

genmodel::WorldConfig random_world(Rng& rng) {
    std::uniform_real_distribution<double> mu(-2.0, 2.0), tau(0.2, 1.5), sig(0.2, 1.0);
    std::uniform_int_distribution<int> reps(1, 4);
    genmodel::WorldConfig w = genmodel::default_world();
    w.popC = {mu(rng), tau(rng)};
    w.popD = {mu(rng), tau(rng)};
    w.popT = {mu(rng), tau(rng)};
    w.noise.sigma = sig(rng);
    w.n_trace = reps(rng);
    w.n_ref = reps(rng);
    return w;
}

// 1. Ranking claims over ten seeds and two rules.
Outcome ranking() {
    std::size_t violated = 0, confirmed = 0, ties = 0;
    double slowest = 0.0;
    for (auto rule : {scoring::ScoringRule::Logarithmic, scoring::ScoringRule::Brier}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            harness::ExperimentConfig cfg;
            cfg.rule = rule;
            cfg.master_seed = seed;
            cfg.n_cases = 20000;
            cfg.threads = 1;
            cfg.keep_cases = false;
            const auto t0 = Clock::now();
            const auto r = harness::run_experiment(cfg);
            slowest = std::max(slowest, seconds_since(t0));
            if (r.ranking_verdicts.size() != 11) return {false, "missing verdicts"};
            violated += r.count(harness::VerdictStatus::Violated);
            confirmed += r.count(harness::VerdictStatus::Confirmed);
            ties += r.count(harness::VerdictStatus::Tie);
        }
    }
    return {violated == 0 && slowest < 60.0,
            "220 verdicts: " + std::to_string(confirmed) + " Confirmed, " + std::to_string(ties) + " Tie, " +
                std::to_string(violated) + " Violated; slowest seed " + fmt(slowest) + " s single-threaded"};
}

// 2. SSXASLR is identically 1.
Outcome ssxaslr_unit() {
    const auto w = genmodel::default_world();
    std::size_t off = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        if (lrsys::evaluate(SystemId::SSXASLR, genmodel::generate_indexed_case(w, kSeed, i), w).lr != 1.0) ++off;
    }
    oracle::PathOracleConfig cfg;
    cfg.n_paths = 100000;
    double lo = INFINITY, hi = -INFINITY;
    std::uint64_t k = 0;
    for (double x : oracle::kGridX) {
        for (double y : oracle::kGridY) {
            Rng rng = make_stream(kSeed, k++, StreamTag::Oracle);
            const double lr = oracle::path_oracle_lr(SystemId::SSXASLR, make_case(x, y, oracle::kGridTheta), w, cfg, rng);
            lo = std::min(lo, lr);
            hi = std::max(hi, lr);
        }
    }
    return {off == 0 && lo >= 0.8 && hi <= 1.25,
            std::to_string(off) + "/10000 cases differ from 1; oracle range [" + fmt(lo, 4) + ", " + fmt(hi, 4) +
                "] at 1e5 paths"};
}

// 3. Closed forms against the path oracle.
Outcome oracle_equivalence() {
    oracle::PathOracleConfig cfg;
    cfg.n_paths = 1000000;
    const std::vector<SystemId> systems(lrsys::kNontrivialSystems.begin(), lrsys::kNontrivialSystems.end());
    const auto t0 = Clock::now();
    const auto grid = oracle::path_oracle_grid(systems, genmodel::default_world(), cfg, kSeed);
    const double secs = seconds_since(t0);
    std::size_t bad = 0;
    double worst_se = 0.0, worst_abs = 0.0;
    for (const auto& g : grid) {
        worst_se = std::max(worst_se, g.diff_in_se());
        worst_abs = std::max(worst_abs, g.abs_diff());
        if (!(g.diff_in_se() < 3.0) || !(g.abs_diff() < 0.15)) ++bad;
    }
    return {grid.size() == 63 && bad == 0 && secs < 300.0,
            std::to_string(grid.size()) + " comparisons, " + std::to_string(bad) + " outside 3 SE; worst " +
                fmt(worst_se) + " SE, worst |dlog10| " + fmt(worst_abs) + "; " + fmt(secs) + " s"};
}

// 4. Decomposition identity and the ill-conditioning experiment.
Outcome decomposition() {
    Rng rng(kSeed);
    std::normal_distribution<double> ev(0.0, 1.5);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto w = random_world(rng);
        const double x = ev(rng), y = ev(rng), th = ev(rng);
        const auto c = make_case(x, y, th);
        const double cs = ref::log_csflr(x, y, w);
        const double ss = ref::log_ssflr(x, y, th, w);
        const double pairs[][2] = {
            {lrsys::csyaslr(lrsys::common_view(c), w).log_lr + lrsys::log_anchor_lr(y, lrsys::AnchorKind::Y, w), cs},
            {lrsys::csxaslr(lrsys::common_view(c), w).log_lr + lrsys::log_anchor_lr(x, lrsys::AnchorKind::X, w), cs},
            {lrsys::ssyaslr(lrsys::specific_view(c), w).log_lr +
                 lrsys::log_specific_anchor_lr(y, lrsys::AnchorKind::Y, c.r, w), ss},
            {lrsys::ssxaslr(lrsys::specific_view(c), w).log_lr +
                 lrsys::log_specific_anchor_lr(x, lrsys::AnchorKind::X, c.r, w), ss},
        };
        for (const auto& p : pairs) worst = std::max(worst, std::fabs(std::expm1(p[0] - p[1])));
    }
    auto w = genmodel::default_world();
    w.popT = {2.0, 1.0};
    const auto ill = harness::ill_conditioning_experiment(w, 20000, kSeed);
    const bool ok = worst < 1e-9 && ill.max_rel_err_proper_vs_joint < 1e-9 && ill.gap_mean > 2.0 * ill.gap_se;
    return {ok, "max relative error " + fmt(worst) + " on 100 cases; proper - naive = " + fmt(ill.gap_mean, 4) +
                    " (" + fmt(ill.gap_in_se) + " SE) at mu_T - mu_C = 2"};
}

// 5. CSFLR terms are theta-averages of specific-source terms.
Outcome averaging_identity() {
    Rng rng(kSeed + 1);
    std::normal_distribution<double> ev(0.0, 1.2);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto w = random_world(rng);
        const double x = ev(rng), y = ev(rng);
        const double vt = w.trace_var(), vr = w.ref_var();
        const double num = ref::theta_average([&](double t) { return ref::npdf(x, t, vt) * ref::npdf(y, t, vr); }, w.popC,
                                             (x * vr + y * vt) / (vt + vr), std::sqrt(vt * vr / (vt + vr)));
        const double den = ref::theta_average([&](double t) { return ref::npdf(x, t, vt); }, w.popT, x, std::sqrt(vt)) *
                           ref::theta_average([&](double t) { return ref::npdf(y, t, vr); }, w.popD, y, std::sqrt(vr));
        const double lr = lrsys::csflr(lrsys::common_view(make_case(x, y, 0.0)), w).lr;
        worst = std::max(worst, std::fabs(lr / (num / den) - 1.0));
    }
    return {worst < 1e-6, "max relative error " + fmt(worst) + " on 100 evidence points"};
}

// 6. Scoring rules.
Outcome scoring_suite() {
    const auto lg = scoring::honesty_check(scoring::ScoringRule::Logarithmic, 0.01);
    const auto br = scoring::honesty_check(scoring::ScoringRule::Brier, 0.01);
    const auto t3 = scoring::honesty_check(scoring::ScoringRule::ImproperTable3, 0.1);
    const double honest = scoring::expected_score(scoring::ScoringRule::ImproperTable3, 0.1, 0.1);
    const double dishonest = scoring::expected_score(scoring::ScoringRule::ImproperTable3, 0.0, 0.1);
    // 0.1 x 1 + 0.9 x 1.95 is 1.855 exactly; quoted to two decimals as 1.86.
    const bool table = std::fabs(honest - 1.855) < 1e-12 && std::fabs(honest - 1.86) <= 0.005 + 1e-12 &&
                       std::fabs(dishonest - 2.7) < 1e-12;
    const bool ok = lg.is_honest && lg.counterexamples.empty() && br.is_honest && br.counterexamples.empty() &&
                    !t3.is_honest && table;
    return {ok, "log " + std::to_string(lg.counterexamples.size()) + " and Brier " +
                    std::to_string(br.counterexamples.size()) + " counterexamples; ImproperTable3 honest " + fmt(honest, 4) +
                    " vs dishonest " + fmt(dishonest, 4) + ", " + std::to_string(t3.counterexamples.size()) +
                    " counterexamples"};
}

// 7. Calibration of every system on the default world.
Outcome calibration() {
    harness::ExperimentConfig cfg;
    cfg.n_cases = 100000;
    cfg.master_seed = kSeed;
    cfg.keep_cases = false;
    const auto r = harness::run_experiment(cfg);
    std::size_t failing = 0;
    double worst = 0.0;
    for (const auto& [s, c] : r.calibration) {
        if (!c.passes(3.0)) ++failing;
        worst = std::max(worst, c.max_abs_gap);
    }
    return {failing == 0 && r.calibration.size() == 9,
            std::to_string(r.calibration.size() - failing) + "/" + std::to_string(r.calibration.size()) +
                " systems within 3 binomial SE per bin at n = 1e5; largest gap " + fmt(worst)};
}

// 8. Tail bounds, with a sabotaged model that must fail.
Outcome tail_bounds() {
    const auto w = genmodel::default_world();
    const std::vector<double> ks{3.0, 10.0, 30.0, 100.0};
    std::size_t fails = 0, rows = 0;
    for (SystemId s : lrsys::kAllSystems) {
        if (s == SystemId::PriorOnly) continue;
        for (const auto& r : costmodel::tail_bound_check(s, w, 100000, ks, kSeed)) {
            ++rows;
            if (!r.pass()) ++fails;
        }
    }
    auto wrong = w;
    wrong.popT = {1.0, 0.0};
    wrong.popD = {0.0, 0.0};
    std::size_t sabotage_fails = 0;
    for (const auto& r : costmodel::tail_bound_check(SystemId::CSSLR, w, 100000, ks, kSeed, wrong)) {
        if (!r.pass()) ++sabotage_fails;
    }
    return {fails == 0 && sabotage_fails > 0,
            std::to_string(rows - fails) + "/" + std::to_string(rows) + " (system, k) rows within bound; sabotaged CSSLR fails at " +
                std::to_string(sabotage_fails) + " of 4 k values"};
}

// 9. Discrete profile example.
Outcome discrete_profile() {
    bool ok = true;
    for (double g : {0.5, 0.1, 0.01}) {
        const auto ss = lrsys::discrete_profile_lr({g}, lrsys::ProfileApproach::SpecificSource);
        const auto cs = lrsys::discrete_profile_lr({g}, lrsys::ProfileApproach::CommonSource);
        ok = ok && ss.lr == cs.lr && std::fabs(ss.lr * g - 1.0) < 1e-15;
        ok = ok && ss.match_numerator == 1.0 && ss.match_denominator == g;
        ok = ok && ss.rarity_numerator == 1.0 && ss.rarity_denominator == 1.0;
        ok = ok && cs.rarity_numerator == g && cs.rarity_denominator == g;
    }
    return {ok, "gamma in {0.5, 0.1, 0.01}: both approaches give 1/gamma, rarity terms 1/1 and gamma/gamma"};
}

// 10. Demand table and trade-off flags.
Outcome demand() {
    const auto t = costmodel::demand_table(0.01, 1000.0);
    auto get = [&](SystemId s, const std::string& name) -> long long {
        for (const auto& p : t) {
            if (p.system == s) return p.detail(name).value.value_or(-1);
        }
        return -1;
    };
    const bool counts = get(SystemId::SSSLR, "shortcut_h1_comparisons") == 190 &&
                        get(SystemId::SSSLR, "shortcut_h2_comparisons") == 1400 &&
                        get(SystemId::CSSLR, "h1_scores") == 100 && get(SystemId::CSSLR, "h2_scores") == 4000 &&
                        get(SystemId::CSSLR, "c_objects") == 200 && get(SystemId::CSSLR, "d_or_t_objects") == 20 &&
                        get(SystemId::CSYASLR, "c_sources") == 5000 &&
                        get(SystemId::CSFLR, "repeats_per_case") == 3 &&
                        get(SystemId::CSFLR, "background_references") == 20;
    bool flags = true;
    for (const auto& r : costmodel::feasibility_rank()) {
        flags = flags && r.infeasible == (r.system == SystemId::SSFLR) && r.favourable == (r.system == SystemId::CSFLR);
    }
    return {counts && flags, std::string("quoted counts ") + (counts ? "match" : "differ") +
                                 "; SSFLR infeasible and CSFLR favourable " + (flags ? "flagged" : "not flagged")};
}

// 11. The CLI is byte-for-byte reproducible.
Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "lrbench_acceptance_determinism";
    fs::remove_all(base);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string(LRBENCH_CLI_PATH) + " rank --config " + LRBENCH_CONFIG_DIR +
                                "/default_world.json --seed 7 --out " + (base / run).string() + " > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "rank exited nonzero"};
    }
    std::size_t same = 0, total = 0;
    for (const char* f : {"report.json", "cases.csv", "calibration.csv", "scores.csv"}) {
        ++total;
        const auto a = slurp(base / "a" / f);
        if (!a.empty() && a == slurp(base / "b" / f)) ++same;
    }
    fs::remove_all(base);
    return {same == total, std::to_string(same) + "/" + std::to_string(total) + " output files byte-identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"ranking claims never violated", ranking},
        {"SSXASLR is identically 1", ssxaslr_unit},
        {"closed forms agree with the path oracle", oracle_equivalence},
        {"decomposition identity and ill-conditioning", decomposition},
        {"CSFLR is the average of specific-source likelihoods", averaging_identity},
        {"scoring-rule honesty and the improper rule", scoring_suite},
        {"posterior calibration", calibration},
        {"LR tail bounds", tail_bounds},
        {"discrete profile decompositions", discrete_profile},
        {"demand table and trade-off flags", demand},
        {"CLI determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

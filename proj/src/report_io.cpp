#include "lrbench/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace lrbench::report {

namespace {

using nlohmann::json;

std::string name(lrsys::SystemId s) { return std::string(lrsys::to_string(s)); }

json summary_json(const harness::ScoreSummary& s) {
    return {{"mean", s.mean}, {"std_error", s.std_error}};
}

json verdict_json(const harness::Verdict& v) {
    return {{"claim_id", v.claim_id},
            {"better", name(v.better)},
            {"worse", name(v.worse)},
            {"status", std::string(harness::to_string(v.status))},
            {"mean_diff", v.mean_diff},
            {"std_error_diff", v.std_error_diff},
            {"margin_in_se", v.margin_in_se}};
}

std::string joined(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += format_double(v[i]);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const scoring::CalibrationReport& c) {
    json assessed = json::array();
    for (bool b : c.bin_assessed) assessed.push_back(b);
    return {{"bin_edges", c.bin_edges},
            {"bin_counts", c.bin_counts},
            {"bin_mean_stated", c.bin_mean_stated},
            {"bin_empirical_freq", c.bin_empirical_freq},
            {"bin_se", c.bin_se},
            {"bin_assessed", assessed},
            {"min_count", c.min_count},
            {"max_abs_gap", c.max_abs_gap},
            {"passes_3se", c.passes(3.0)}};
}

json to_json(const std::vector<oracle::GridComparison>& grid) {
    json out = json::array();
    for (const auto& g : grid) {
        out.push_back({{"system", name(g.system)},
                       {"x", g.x},
                       {"y", g.y},
                       {"closed_form_log10_lr", g.closed_form_log10},
                       {"oracle_log10_lr", g.oracle.log10_lr},
                       {"oracle_log10_se", g.oracle.log10_se},
                       {"accepted_numerator", g.oracle.accepted_numerator},
                       {"accepted_denominator", g.oracle.accepted_denominator},
                       {"abs_diff", g.abs_diff()},
                       {"diff_in_se", g.diff_in_se()},
                       {"within_3se", g.diff_in_se() < 3.0}});
    }
    return out;
}

json to_json(const harness::EvalReport& r) {
    json systems = json::array();
    for (auto s : r.systems) systems.push_back(name(s));
    json per = json::object();
    for (const auto& [s, v] : r.per_system) {
        per[name(s)] = {{"mean_score", v.mean_score},
                        {"std_error", v.std_error},
                        {"n_neg_inf", v.n_neg_inf},
                        {"clamp_events", v.clamp_events}};
    }
    json diffs = json::array();
    for (const auto& d : r.paired_diffs) {
        diffs.push_back({{"a", name(d.a)},
                         {"b", name(d.b)},
                         {"mean_diff", d.mean_diff},
                         {"std_error_diff", d.std_error_diff}});
    }
    json cal = json::object();
    for (const auto& [s, c] : r.calibration) cal[name(s)] = to_json(c);
    json verdicts = json::array();
    for (const auto& v : r.ranking_verdicts) verdicts.push_back(verdict_json(v));
    json out = {{"config", harness::to_json(r.config)},
                {"n_cases", r.config.n_cases},
                {"n_h1", r.n_h1},
                {"systems", systems},
                {"per_system", per},
                {"paired_diffs", diffs},
                {"calibration", cal},
                {"ranking_verdicts", verdicts},
                {"verdict_counts",
                 {{"Confirmed", r.count(harness::VerdictStatus::Confirmed)},
                  {"Tie", r.count(harness::VerdictStatus::Tie)},
                  {"Violated", r.count(harness::VerdictStatus::Violated)}}},
                {"warnings", r.warnings}};
    if (r.config.oracle_check) out["oracle_grid"] = to_json(r.oracle_grid);
    return out;
}

json to_json(const harness::IllConditioningReport& r) {
    return {{"n_cases", r.n_cases},
            {"naive", summary_json(r.naive)},
            {"proper", summary_json(r.proper)},
            {"joint", summary_json(r.joint)},
            {"gap_mean", r.gap_mean},
            {"gap_se", r.gap_se},
            {"gap_in_se", r.gap_in_se},
            {"max_rel_err_proper_vs_joint", r.max_rel_err_proper_vs_joint}};
}

json to_json(const harness::CsPriorReport& r) {
    return {{"n_cases", r.n_cases},
            {"prior_only", summary_json(r.prior_only)},
            {"csflr_updated", summary_json(r.csflr_updated)},
            {"csslr_updated", summary_json(r.csslr_updated)},
            {"csflr_vs_prior", verdict_json(r.csflr_vs_prior)},
            {"csslr_vs_prior", verdict_json(r.csslr_vs_prior)},
            {"violating",
             {{"world", genmodel::to_json(r.violating_world)},
              {"r_prior", summary_json(r.violating_r_prior)},
              {"r_prior_csflr", summary_json(r.violating_r_prior_csflr)},
              {"r_prior_csslr", summary_json(r.violating_r_prior_csslr)},
              {"csflr_gap", r.violating_csflr_gap},
              {"csflr_gap_se", r.violating_csflr_gap_se},
              {"csslr_gap", r.violating_csslr_gap},
              {"csslr_gap_se", r.violating_csslr_gap_se}}}};
}

json to_json(const harness::TotalExpectationResult& r) {
    return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"lhs_se", r.lhs_se}, {"rhs_se", r.rhs_se}, {"gap_in_se", r.gap_in_se}};
}

json tail_to_json(lrsys::SystemId system, const std::vector<costmodel::TailBoundRow>& rows) {
    json arr = json::array();
    for (const auto& t : rows) {
        arr.push_back({{"k", t.k},
                       {"h2_exceedance", t.h2_exceedance},
                       {"h1_exceedance", t.h1_exceedance},
                       {"bound", t.bound},
                       {"h2_pass", t.h2_pass},
                       {"h1_pass", t.h1_pass},
                       {"pass", t.pass()}});
    }
    return {{"system", name(system)}, {"rows", arr}};
}

json to_json(const std::vector<costmodel::DemandProfile>& profiles) {
    json out = json::array();
    for (const auto& p : profiles) {
        json details = json::object();
        for (const auto& d : p.details) {
            details[d.name] = d.count.value ? json(*d.count.value) : json(d.count.symbol);
        }
        auto count = [](const costmodel::Count& c) { return c.value ? json(*c.value) : json(c.symbol); };
        out.push_back({{"system", name(p.system)},
                       {"per_case_source_measurements", count(p.per_case_source_measurements)},
                       {"per_case_trace_measurements", count(p.per_case_trace_measurements)},
                       {"reusable_background_measurements", count(p.reusable_background_measurements)},
                       {"reusable", p.reusable},
                       {"info_loss_dims", costmodel::info_loss_string(p.info_loss_dims)},
                       {"details", details},
                       {"feasibility_note", p.feasibility_note}});
    }
    return out;
}

json to_json(const std::vector<costmodel::TradeoffRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"system", name(r.system)},
                       {"performance_rank", r.performance_rank},
                       {"demand_rank", r.demand_rank},
                       {"info_loss_dims", costmodel::info_loss_string(r.info_loss_dims)},
                       {"infeasible", r.infeasible},
                       {"favourable", r.favourable},
                       {"note", r.note}});
    }
    return out;
}

std::string cases_csv(const harness::EvalReport& r) {
    std::ostringstream os;
    os << "case_id,truth,r_theta,x,y";
    for (auto s : r.systems) os << ',' << name(s) << "_lr," << name(s) << "_posterior";
    os << '\n';
    for (const auto& row : r.cases) {
        os << row.case_id << ',' << genmodel::to_string(row.record.truth) << ','
           << format_double(row.record.r.theta) << ',' << joined(row.record.x) << ','
           << joined(row.record.y);
        for (std::size_t s = 0; s < r.systems.size(); ++s) {
            os << ',' << format_double(row.lr[s]) << ',' << format_double(row.posterior[s]);
        }
        os << '\n';
    }
    return os.str();
}

std::string calibration_csv(const harness::EvalReport& r) {
    std::ostringstream os;
    os << "system,bin_lo,bin_hi,count,mean_stated,empirical_freq,se,assessed\n";
    for (const auto& [s, c] : r.calibration) {
        for (std::size_t b = 0; b < c.bin_counts.size(); ++b) {
            os << name(s) << ',' << format_double(c.bin_edges[b]) << ','
               << format_double(c.bin_edges[b + 1]) << ',' << c.bin_counts[b] << ','
               << format_double(c.bin_mean_stated[b]) << ',' << format_double(c.bin_empirical_freq[b])
               << ',' << format_double(c.bin_se[b]) << ',' << (c.bin_assessed[b] ? "true" : "false")
               << '\n';
        }
    }
    return os.str();
}

std::string scores_csv(const harness::EvalReport& r) {
    std::ostringstream os;
    os << "system,rule,mean_score,std_error\n";
    for (const auto& [s, v] : r.per_system) {
        os << name(s) << ',' << scoring::to_string(r.config.rule) << ',' << format_double(v.mean_score)
           << ',' << format_double(v.std_error) << '\n';
    }
    return os.str();
}

std::string oracle_csv(const std::vector<oracle::GridComparison>& grid) {
    std::ostringstream os;
    os << "system,x,y,closed_form_log10_lr,oracle_log10_lr,oracle_log10_se,diff_in_se\n";
    for (const auto& g : grid) {
        os << name(g.system) << ',' << format_double(g.x) << ',' << format_double(g.y) << ','
           << format_double(g.closed_form_log10) << ',' << format_double(g.oracle.log10_lr) << ','
           << format_double(g.oracle.log10_se) << ',' << format_double(g.diff_in_se()) << '\n';
    }
    return os.str();
}

}  // namespace lrbench::report

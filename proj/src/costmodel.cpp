#include "lrbench/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lrbench/errors.hpp"
#include "lrbench/harness.hpp"

namespace lrbench::costmodel {

namespace {

// Reference range the quoted counts refer to.
constexpr double kRefH1 = 100.0;
constexpr double kRefH2 = 1000.0;
constexpr long long kAnchorCategories = 50;

long long scaled(double base, double factor) {
    return static_cast<long long>(std::ceil(base * factor - 1e-9));
}

// Smallest m with m (m - 1) / 2 >= pairs.
long long objects_for_pairs(long long pairs) {
    long long m = 2;
    while (m * (m - 1) / 2 < pairs) ++m;
    return m;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

const Count& DemandProfile::detail(const std::string& name) const {
    for (const auto& d : details) {
        if (d.name == name) return d.count;
    }
    throw ConfigError("demand profile " + std::string(lrsys::to_string(system)) +
                      " has no detail \"" + name + "\"");
}

long long required_h1_scores(double lr_min) {
    return static_cast<long long>(std::ceil(1.0 / lr_min - 1e-9));
}

long long required_h2_scores(double lr_max) {
    return static_cast<long long>(std::ceil(lr_max - 1e-9));
}

std::string info_loss_string(const std::vector<char>& dims) {
    if (dims.empty()) return "none";
    return std::string(dims.begin(), dims.end());
}

std::vector<DemandProfile> demand_table(double target_lr_min, double target_lr_max) {
    if (!(target_lr_min > 0.0 && target_lr_min < 1.0 && target_lr_max > 1.0 &&
          std::isfinite(target_lr_max))) {
        throw ConfigError("demand_table: need 0 < target_lr_min < 1 < target_lr_max");
    }
    const long long n_h1 = required_h1_scores(target_lr_min);
    const long long n_h2 = required_h2_scores(target_lr_max);
    const double f1 = static_cast<double>(n_h1) / kRefH1;
    const double f2 = static_cast<double>(n_h2) / kRefH2;
    std::vector<DemandProfile> out;

    {
        DemandProfile p;
        p.system = SystemId::SSFLR;
        p.per_case_source_measurements = Count::symbolic("large");
        p.per_case_trace_measurements = Count::of(1);
        p.reusable_background_measurements = Count::of(0);
        p.reusable = false;
        p.feasibility_note =
            "all knowledge of r comes from reference measurements, so every case needs enough of "
            "them to pin r down; infeasible with measurement randomness and more than one feature";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::CSFLR;
        p.per_case_source_measurements = Count::of(3);
        p.per_case_trace_measurements = Count::of(3);
        p.reusable_background_measurements = Count::of(20);
        p.reusable = true;
        p.info_loss_dims = {'R'};
        p.details = {{"repeats_per_case", Count::of(3)}, {"background_references", Count::of(20)}};
        p.feasibility_note =
            "one-dimensional features: about 3 repeats of x and y per case plus one reusable "
            "collection of about 20 background references per population";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::SSSLR;
        const long long ref_objects = scaled(100.0, f1);
        const long long t_traces = scaled(20.0, f2);
        const long long m = objects_for_pairs(scaled(190.0, f1));
        const long long t_short = scaled(70.0, f2);
        p.per_case_source_measurements = Count::of(ref_objects);
        p.per_case_trace_measurements = Count::of(1);
        p.reusable_background_measurements = Count::of(t_traces);
        p.reusable = false;
        p.info_loss_dims = {'X', 'Y'};
        p.details = {{"h1_scores", Count::of(n_h1)},
                     {"h2_scores", Count::of(ref_objects * t_traces)},
                     {"background_traces", Count::of(t_traces)},
                     {"shortcut_source_objects", Count::of(m)},
                     {"shortcut_h1_comparisons", Count::of(m * (m - 1) / 2)},
                     {"shortcut_background_traces", Count::of(t_short)},
                     {"shortcut_h2_comparisons", Count::of(m * t_short)}};
        p.feasibility_note =
            "per case about 100 objects from the reference source; 20 reusable traces from T "
            "give 2000 non-i.i.d. H2 scores; cross-comparing 20 source objects gives 190 H1 and, "
            "against 70 T measurements, 1400 H2 comparisons";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::CSSLR;
        const long long c_objects = 2 * scaled(100.0, f1);
        const long long d_objects = scaled(20.0, f2);
        p.per_case_source_measurements = Count::of(1);
        p.per_case_trace_measurements = Count::of(1);
        p.reusable_background_measurements = Count::of(c_objects + d_objects);
        p.reusable = true;
        p.info_loss_dims = {'R', 'X', 'Y'};
        p.details = {{"c_objects", Count::of(c_objects)},
                     {"d_or_t_objects", Count::of(d_objects)},
                     {"h1_scores", Count::of(c_objects / 2)},
                     {"h2_scores", Count::of(c_objects * d_objects)}};
        p.feasibility_note =
            "200 objects from C paired into 100 i.i.d. H1 scores and 20 from D or T crossed into "
            "4000 H2 scores, all reusable; the least demanding class";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::SSYASLR;
        const long long objects = scaled(100.0, f1);
        const long long t_meas = scaled(1000.0, f2);
        p.per_case_source_measurements = Count::of(objects);
        p.per_case_trace_measurements = Count::of(1);
        p.reusable_background_measurements = Count::of(t_meas);
        p.reusable = false;
        p.info_loss_dims = {'X'};
        p.details = {{"h1_scores", Count::of(objects)}, {"h2_scores", Count::of(t_meas)}};
        p.feasibility_note =
            "per case about 100 objects from the reference source compared to y; about 1000 "
            "reusable measurements from T";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::CSYASLR;
        const long long per_category = scaled(100.0, f1);
        const long long c_sources = per_category * kAnchorCategories;
        const long long t_sources = scaled(20.0, f2);
        p.per_case_source_measurements = Count::of(1);
        p.per_case_trace_measurements = Count::of(1);
        p.reusable_background_measurements = Count::of(3 * c_sources + t_sources);
        p.reusable = true;
        p.info_loss_dims = {'R', 'X'};
        p.details = {{"anchor_categories", Count::of(kAnchorCategories)},
                     {"c_sources", Count::of(c_sources)},
                     {"c_traces", Count::of(c_sources)},
                     {"d_sources", Count::of(c_sources)},
                     {"t_sources", Count::of(t_sources)},
                     {"h1_selected_pairs", Count::of(per_category)},
                     {"h2_scores", Count::of(t_sources * per_category)}};
        p.feasibility_note =
            "to condition on 50 categories of y: 5000 sources from C with 5000 traces, 5000 "
            "sources from D when C differs from D, and 20 from T for 2000 H2 scores; reusable";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::SSXASLR;
        p.per_case_source_measurements = Count::of(0);
        p.per_case_trace_measurements = Count::of(0);
        p.reusable_background_measurements = Count::of(0);
        p.reusable = false;
        p.info_loss_dims = {'X', 'Y'};
        p.feasibility_note = "the LR is identically 1, so no data are needed and none is used";
        out.push_back(p);
    }
    {
        DemandProfile p;
        p.system = SystemId::CSXASLR;
        const long long per_category = scaled(100.0, f1);
        const long long c_sources = per_category * kAnchorCategories;
        const long long d_sources = scaled(20.0, f2);
        p.per_case_source_measurements = Count::of(1);
        p.per_case_trace_measurements = Count::of(1);
        p.reusable_background_measurements = Count::of(3 * c_sources + d_sources);
        p.reusable = true;
        p.info_loss_dims = {'R', 'Y'};
        p.details = {{"anchor_categories", Count::of(kAnchorCategories)},
                     {"c_sources", Count::of(c_sources)},
                     {"c_references", Count::of(c_sources)},
                     {"t_sources", Count::of(c_sources)},
                     {"d_sources", Count::of(d_sources)},
                     {"h1_selected_pairs", Count::of(per_category)},
                     {"h2_scores", Count::of(d_sources * per_category)}};
        p.feasibility_note =
            "as the y-anchored class, but the T measurements are selected by their closeness to x";
        out.push_back(p);
    }

    std::sort(out.begin(), out.end(),
              [](const DemandProfile& a, const DemandProfile& b) { return a.system < b.system; });
    for (auto& p : out) std::sort(p.info_loss_dims.begin(), p.info_loss_dims.end());
    return out;
}

std::vector<TradeoffRow> feasibility_rank() {
    const std::vector<SystemId> systems = {SystemId::SSFLR,   SystemId::CSFLR,   SystemId::SSSLR,
                                           SystemId::CSSLR,   SystemId::SSYASLR, SystemId::CSYASLR,
                                           SystemId::CSXASLR};
    // Longest chain of claims above each system.
    std::map<SystemId, int> depth;
    for (SystemId s : systems) depth[s] = 0;
    for (std::size_t pass = 0; pass < systems.size(); ++pass) {
        for (const auto& c : harness::ranking_claims()) {
            if (!depth.contains(c.better) || !depth.contains(c.worse)) continue;
            depth[c.worse] = std::max(depth[c.worse], depth[c.better] + 1);
        }
    }
    const std::map<SystemId, int> demand = {
        {SystemId::CSSLR, 1},   {SystemId::CSFLR, 2}, {SystemId::CSYASLR, 3}, {SystemId::CSXASLR, 3},
        {SystemId::SSSLR, 4},   {SystemId::SSYASLR, 5}, {SystemId::SSFLR, 6},
    };
    const auto profiles = demand_table();
    std::vector<TradeoffRow> out;
    for (SystemId s : systems) {
        TradeoffRow r;
        r.system = s;
        r.performance_rank = 1 + depth.at(s);
        r.demand_rank = demand.at(s);
        r.infeasible = s == SystemId::SSFLR;
        r.favourable = s == SystemId::CSFLR;
        for (const auto& p : profiles) {
            if (p.system == s) r.info_loss_dims = p.info_loss_dims;
        }
        switch (s) {
            case SystemId::SSFLR:
                r.note = "no information loss but practically infeasible when Y given r is random and there is more than one feature";
                break;
            case SystemId::CSFLR:
                r.note = "loss restricted to R with a one-time reusable investment; comes out favourably";
                break;
            case SystemId::CSSLR:
                r.note = "least experimental demand and the most information loss";
                break;
            case SystemId::SSSLR:
            case SystemId::SSYASLR:
                r.note = "needs a fresh set of source measurements in every case";
                break;
            default:
                r.note = "reusable background but thousands of sources to condition on the anchor";
                break;
        }
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const TradeoffRow& a, const TradeoffRow& b) {
        if (a.performance_rank != b.performance_rank) return a.performance_rank < b.performance_rank;
        return a.system < b.system;
    });
    return out;
}

std::vector<TailBoundRow> tail_bound_check(SystemId system, const WorldConfig& world,
                                           std::size_t n_cases, const std::vector<double>& k_values,
                                           std::uint64_t seed,
                                           const std::optional<WorldConfig>& model_world) {
    genmodel::validate(world);
    if (n_cases < 1) throw ConfigError("tail_bound_check: n_cases must be >= 1");
    for (double k : k_values) {
        if (!(k >= 1.0) || !std::isfinite(k)) throw ConfigError("tail_bound_check: k must be >= 1");
    }
    const WorldConfig& model = model_world ? *model_world : world;
    std::vector<double> log_lr_h2(n_cases), log_lr_h1(n_cases);
    harness::parallel_for(n_cases, 0, [&](std::size_t i) {
        Rng a = make_stream(seed, i, StreamTag::TailBound);
        log_lr_h2[i] = lrsys::evaluate(system, genmodel::generate_case_given(world, genmodel::Hypothesis::H2, a), model).log_lr;
        Rng b = make_stream(seed, n_cases + i, StreamTag::TailBound);
        log_lr_h1[i] = lrsys::evaluate(system, genmodel::generate_case_given(world, genmodel::Hypothesis::H1, b), model).log_lr;
    });
    const double n = static_cast<double>(n_cases);
    std::vector<TailBoundRow> out;
    for (double k : k_values) {
        const double lk = std::log(k);
        const auto above = std::count_if(log_lr_h2.begin(), log_lr_h2.end(), [&](double v) { return v > lk; });
        const auto below = std::count_if(log_lr_h1.begin(), log_lr_h1.end(), [&](double v) { return v < -lk; });
        TailBoundRow r;
        r.k = k;
        r.h2_exceedance = static_cast<double>(above) / n;
        r.h1_exceedance = static_cast<double>(below) / n;
        const double p = 1.0 / k;
        r.bound = p + 3.0 * std::sqrt(p * (1.0 - p) / n);
        r.h2_pass = r.h2_exceedance <= r.bound;
        r.h1_pass = r.h1_exceedance <= r.bound;
        out.push_back(r);
    }
    return out;
}

std::string demand_csv(const std::vector<DemandProfile>& profiles) {
    std::ostringstream os;
    os << "system,per_case_source_measurements,per_case_trace_measurements,"
          "reusable_background_measurements,reusable,info_loss,details,notes\n";
    for (const auto& p : profiles) {
        std::string details;
        for (const auto& d : p.details) {
            if (!details.empty()) details += ';';
            details += d.name + "=" + d.count.str();
        }
        os << lrsys::to_string(p.system) << ',' << p.per_case_source_measurements.str() << ','
           << p.per_case_trace_measurements.str() << ',' << p.reusable_background_measurements.str()
           << ',' << (p.reusable ? "true" : "false") << ',' << info_loss_string(p.info_loss_dims)
           << ',' << csv_field(details) << ',' << csv_field(p.feasibility_note) << '\n';
    }
    return os.str();
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
    std::ostringstream os;
    os << "system,performance_rank,demand_rank,info_loss,infeasible,favourable,notes\n";
    for (const auto& r : rows) {
        os << lrsys::to_string(r.system) << ',' << r.performance_rank << ',' << r.demand_rank << ','
           << info_loss_string(r.info_loss_dims) << ',' << (r.infeasible ? "true" : "false") << ','
           << (r.favourable ? "true" : "false") << ',' << csv_field(r.note) << '\n';
    }
    return os.str();
}

}  // namespace lrbench::costmodel

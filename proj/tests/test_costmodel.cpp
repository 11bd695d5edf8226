#include <catch_amalgamated.hpp>

#include <algorithm>

#include "lrbench/costmodel.hpp"
#include "lrbench/errors.hpp"
#include "lrbench/harness.hpp"

using namespace lrbench;
using namespace lrbench::costmodel;
using lrsys::SystemId;

namespace {

const DemandProfile& profile(const std::vector<DemandProfile>& t, SystemId s) {
    for (const auto& p : t) {
        if (p.system == s) return p;
    }
    throw std::logic_error("missing profile");
}

long long num(const DemandProfile& p, const std::string& name) { return p.detail(name).value.value(); }

}  // namespace

TEST_CASE("rule-of-thumb score counts") {
    CHECK(required_h1_scores(0.01) == 100);
    CHECK(required_h2_scores(1000.0) == 1000);
    CHECK(required_h1_scores(0.1) == 10);
    CHECK(required_h2_scores(10.0) == 10);
    CHECK(required_h2_scores(10.5) == 11);
}

TEST_CASE("default range reproduces the quoted counts") {
    const auto t = demand_table(0.01, 1000.0);
    const auto& ssslr = profile(t, SystemId::SSSLR);
    CHECK(num(ssslr, "h1_scores") == 100);
    CHECK(num(ssslr, "background_traces") == 20);
    CHECK(num(ssslr, "h2_scores") == 2000);
    CHECK(num(ssslr, "shortcut_source_objects") == 20);
    CHECK(num(ssslr, "shortcut_h1_comparisons") == 190);
    CHECK(num(ssslr, "shortcut_background_traces") == 70);
    CHECK(num(ssslr, "shortcut_h2_comparisons") == 1400);

    const auto& csslr = profile(t, SystemId::CSSLR);
    CHECK(num(csslr, "c_objects") == 200);
    CHECK(num(csslr, "d_or_t_objects") == 20);
    CHECK(num(csslr, "h1_scores") == 100);
    CHECK(num(csslr, "h2_scores") == 4000);
    CHECK(csslr.reusable);

    const auto& csya = profile(t, SystemId::CSYASLR);
    CHECK(num(csya, "anchor_categories") == 50);
    CHECK(num(csya, "c_sources") == 5000);
    CHECK(num(csya, "c_traces") == 5000);
    CHECK(num(csya, "d_sources") == 5000);
    CHECK(num(csya, "t_sources") == 20);
    CHECK(num(csya, "h1_selected_pairs") == 100);
    CHECK(num(csya, "h2_scores") == 2000);

    const auto& csfl = profile(t, SystemId::CSFLR);
    CHECK(num(csfl, "repeats_per_case") == 3);
    CHECK(num(csfl, "background_references") == 20);

    const auto& ssya = profile(t, SystemId::SSYASLR);
    CHECK(num(ssya, "h1_scores") == 100);
    CHECK(num(ssya, "h2_scores") == 1000);
}

TEST_CASE("specific-source feature LR needs no background and loses nothing") {
    const auto t = demand_table();
    const auto& ssflr = profile(t, SystemId::SSFLR);
    CHECK(ssflr.reusable_background_measurements == Count::of(0));
    CHECK(ssflr.info_loss_dims.empty());
    CHECK(ssflr.per_case_source_measurements.is_symbolic());
    for (const auto& p : t) {
        if (p.system != SystemId::SSFLR) CHECK_FALSE(p.info_loss_dims.empty());
    }
    CHECK(info_loss_string(profile(t, SystemId::CSSLR).info_loss_dims) == "RXY");
}

TEST_CASE("counts scale with the target range") {
    const auto t = demand_table(0.1, 10.0);
    const auto& csslr = profile(t, SystemId::CSSLR);
    CHECK(num(csslr, "h1_scores") == 10);
    CHECK(num(profile(t, SystemId::SSSLR), "h1_scores") == 10);
    // The 190 shortcut comparisons scale to 19, which needs 7 objects (7 * 6 / 2 = 21).
    CHECK(num(profile(t, SystemId::SSSLR), "shortcut_source_objects") == 7);
    CHECK(num(profile(t, SystemId::SSSLR), "shortcut_h1_comparisons") == 21);
    CHECK(num(profile(t, SystemId::SSYASLR), "h2_scores") == 10);

    CHECK_THROWS_AS(demand_table(0.0, 1000.0), ConfigError);
    CHECK_THROWS_AS(demand_table(0.5, 0.9), ConfigError);
    CHECK(demand_csv(demand_table()) == demand_csv(demand_table()));
}

TEST_CASE("feasibility ranking") {
    const auto rows = feasibility_rank();
    REQUIRE(rows.size() == 7);
    auto row = [&](SystemId s) {
        return *std::find_if(rows.begin(), rows.end(), [&](const TradeoffRow& r) { return r.system == s; });
    };
    CHECK(row(SystemId::SSFLR).performance_rank == 1);
    CHECK(row(SystemId::SSFLR).infeasible);
    int max_demand = 0;
    for (const auto& r : rows) max_demand = std::max(max_demand, r.demand_rank);
    CHECK(row(SystemId::SSFLR).demand_rank == max_demand);
    CHECK(row(SystemId::CSSLR).demand_rank == 1);
    CHECK(row(SystemId::CSFLR).favourable);
    for (const auto& r : rows) {
        if (r.system != SystemId::SSFLR) CHECK_FALSE(r.infeasible);
        if (r.system != SystemId::CSFLR) CHECK_FALSE(r.favourable);
    }
    // Never contradicts a ranking claim.
    for (const auto& c : harness::ranking_claims()) {
        if (c.better == SystemId::PriorOnly || c.worse == SystemId::PriorOnly) continue;
        CHECK(row(c.better).performance_rank < row(c.worse).performance_rank);
    }
}

TEST_CASE("CSV output") {
    const auto csv = demand_csv(demand_table());
    CHECK(csv.find("SSSLR") != std::string::npos);
    CHECK(csv.find("1400") != std::string::npos);
    const auto tr = tradeoff_csv(feasibility_rank());
    CHECK(tr.rfind("system,", 0) == 0);
    CHECK(std::count(tr.begin(), tr.end(), '\n') == 8);
}

TEST_CASE("tail bounds hold for calibrated systems") {
    const auto w = genmodel::default_world();
    for (SystemId s : {SystemId::CSFLR, SystemId::SSFLR, SystemId::CSYASLR}) {
        for (const auto& r : tail_bound_check(s, w, 20000, {1.0, 3.0, 10.0, 30.0, 100.0}, 1)) {
            INFO(lrsys::to_string(s) << " k=" << r.k);
            CHECK(r.pass());
            if (r.k == 1.0) CHECK(r.bound == 1.0);
        }
    }
}

TEST_CASE("a miscalibrated model breaks the tail bound") {
    const auto w = genmodel::default_world();
    genmodel::WorldConfig wrong = w;
    wrong.popT = {1.0, 0.0};
    wrong.popD = {0.0, 0.0};
    const auto rows = tail_bound_check(SystemId::CSSLR, w, 20000, {3.0, 10.0, 30.0, 100.0}, 1, wrong);
    CHECK(std::any_of(rows.begin(), rows.end(), [](const TailBoundRow& r) { return !r.pass(); }));
    CHECK_THROWS_AS(tail_bound_check(SystemId::CSSLR, w, 100, {0.5}, 1), ConfigError);
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "lrbench/errors.hpp"
#include "lrbench/path_oracle.hpp"

using namespace lrbench;
using namespace lrbench::oracle;
using genmodel::CaseRecord;
using lrsys::SystemId;

namespace {

CaseRecord grid_case(double x, double y) {
    CaseRecord c;
    c.r = c.trace_source = {kGridTheta};
    c.x = {x};
    c.y = {y};
    return c;
}

PathOracleConfig with_paths(std::size_t n) {
    PathOracleConfig cfg;
    cfg.n_paths = n;
    return cfg;
}

}  // namespace

TEST_CASE("SSXASLR oracle is close to 1") {
    const auto w = genmodel::default_world();
    for (auto [x, y] : {std::pair{-0.2, -0.1}, {0.4, 0.3}, {1.0, 0.7}}) {
        Rng rng = make_stream(5, 0, StreamTag::Oracle);
        const double lr = path_oracle_lr(SystemId::SSXASLR, grid_case(x, y), w, with_paths(100000), rng);
        CHECK(lr >= 0.8);
        CHECK(lr <= 1.25);
    }
}

TEST_CASE("oracle agrees with closed forms at a central grid point") {
    const auto w = genmodel::default_world();
    const auto c = grid_case(0.4, 0.3);
    for (SystemId s : lrsys::kNontrivialSystems) {
        Rng rng = make_stream(17, static_cast<std::uint64_t>(s), StreamTag::Oracle);
        const auto est = path_oracle_estimate(s, c, w, with_paths(200000), rng);
        const double cf = lrsys::evaluate(s, c, w).log10_lr;
        INFO(lrsys::to_string(s) << " closed " << cf << " oracle " << est.log10_lr << " se " << est.log10_se);
        CHECK(est.log10_se > 0.0);
        CHECK(std::fabs(est.log10_lr - cf) < 3.0 * est.log10_se);
        CHECK(est.accepted_numerator >= 50);
        CHECK(est.accepted_denominator >= 50);
    }
}

TEST_CASE("absolute-difference score systems agree with the folded closed forms") {
    auto w = genmodel::default_world();
    w.score_kind = genmodel::ScoreKind::AbsoluteDifference;
    const auto c = grid_case(1.0, 0.3);
    for (SystemId s : {SystemId::SSSLR, SystemId::CSSLR, SystemId::CSYASLR}) {
        Rng rng = make_stream(23, static_cast<std::uint64_t>(s), StreamTag::Oracle);
        const auto est = path_oracle_estimate(s, c, w, with_paths(200000), rng);
        const double cf = lrsys::evaluate(s, c, w).log10_lr;
        INFO(lrsys::to_string(s) << " closed " << cf << " oracle " << est.log10_lr << " se " << est.log10_se);
        CHECK(std::fabs(est.log10_lr - cf) < 3.0 * est.log10_se);
    }
}

TEST_CASE("halving the bin with four times the paths moves the estimate by less than noise") {
    const auto w = genmodel::default_world();
    const auto c = grid_case(0.4, 0.3);
    for (SystemId s : {SystemId::SSFLR, SystemId::CSFLR}) {
        Rng a = make_stream(3, 0, StreamTag::Oracle), b = make_stream(3, 1, StreamTag::Oracle);
        auto wide = with_paths(400000);
        auto narrow = with_paths(1600000);
        narrow.bin_width = wide.bin_width / 2.0;
        const auto e1 = path_oracle_estimate(s, c, w, wide, a);
        const auto e2 = path_oracle_estimate(s, c, w, narrow, b);
        CHECK(std::fabs(e1.log10_lr - e2.log10_lr) < 3.0 * std::hypot(e1.log10_se, e2.log10_se));
    }
}

TEST_CASE("halving the anchor window moves the estimate by less than noise") {
    const auto w = genmodel::default_world();
    const auto c = grid_case(0.4, 0.3);
    Rng a = make_stream(4, 0, StreamTag::Oracle), b = make_stream(4, 1, StreamTag::Oracle);
    auto wide = with_paths(200000);
    auto narrow = with_paths(400000);
    narrow.anchor_tolerance = wide.anchor_tolerance / 2.0;
    const auto e1 = path_oracle_estimate(SystemId::CSYASLR, c, w, wide, a);
    const auto e2 = path_oracle_estimate(SystemId::CSYASLR, c, w, narrow, b);
    CHECK(std::fabs(e1.log10_lr - e2.log10_lr) < 3.0 * std::hypot(e1.log10_se, e2.log10_se));
}

TEST_CASE("oracle is deterministic given the stream") {
    const auto w = genmodel::default_world();
    const auto c = grid_case(-0.2, 0.7);
    Rng a = make_stream(9, 2, StreamTag::Oracle), b = make_stream(9, 2, StreamTag::Oracle);
    const auto e1 = path_oracle_estimate(SystemId::CSYASLR, c, w, with_paths(50000), a);
    const auto e2 = path_oracle_estimate(SystemId::CSYASLR, c, w, with_paths(50000), b);
    CHECK(e1.log10_lr == e2.log10_lr);
    CHECK(e1.log10_se == e2.log10_se);
}

TEST_CASE("too few accepted paths is reported") {
    const auto w = genmodel::default_world();
    auto cfg = with_paths(1000);
    cfg.bin_width = 1e-4;
    Rng rng(1);
    CHECK_THROWS_AS(path_oracle_estimate(SystemId::CSFLR, grid_case(0.4, 0.3), w, cfg, rng),
                    InsufficientPathsError);
    auto anchored = with_paths(1000);
    anchored.anchor_tolerance = 1e-5;
    CHECK_THROWS_AS(path_oracle_estimate(SystemId::CSXASLR, grid_case(0.4, 0.3), w, anchored, rng),
                    InsufficientPathsError);
}

TEST_CASE("oracle configuration is validated") {
    const auto w = genmodel::default_world();
    Rng rng(1);
    CHECK_THROWS_AS(path_oracle_lr(SystemId::PriorOnly, grid_case(0, 0), w, with_paths(10000), rng), ConfigError);
    CHECK_THROWS_AS(validate(with_paths(999)), ConfigError);
    auto bad = with_paths(10000);
    bad.bin_width = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = with_paths(10000);
    bad.anchor_tolerance = -1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("grid comparisons do not depend on system order") {
    const auto w = genmodel::default_world();
    const auto cfg = with_paths(20000);
    const auto a = path_oracle_grid({SystemId::CSSLR, SystemId::SSSLR}, w, cfg, 8);
    const auto b = path_oracle_grid({SystemId::SSSLR, SystemId::CSSLR}, w, cfg, 8);
    REQUIRE(a.size() == 18);
    REQUIRE(b.size() == 18);
    for (const auto& g : a) {
        bool found = false;
        for (const auto& h : b) {
            if (h.system == g.system && h.x == g.x && h.y == g.y) {
                found = true;
                CHECK(h.oracle.log10_lr == g.oracle.log10_lr);
            }
        }
        CHECK(found);
    }
}

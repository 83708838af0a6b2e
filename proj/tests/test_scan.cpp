#include "doctest.h"

#include <cmath>
#include <string>

#include "nmext/errors.hpp"
#include "nmext/scan.hpp"

using namespace nmext;
using namespace nmext::scan;

TEST_CASE("strategy decoding is fixed-point free by construction") {
    // digit 0 everywhere: y' = y + 1
    auto f0 = decode_strategy(0, 3, 1);
    REQUIRE(f0.size() == 1);
    CHECK(f0[0] == std::vector<u64>{1, 2, 0});

    // 5 = base-2 digits (1,0,1) at positions (e=0, y=0..2)
    auto f5 = decode_strategy(5, 3, 1);
    CHECK(f5[0] == std::vector<u64>{2, 2, 1});

    for (u64 idx = 0; idx < 8; ++idx)
        for (int e = 0; e < 1; ++e) {
            auto f = decode_strategy(idx, 3, 1);
            for (u64 y = 0; y < 3; ++y) CHECK(f[static_cast<std::size_t>(e)][y] != y);
        }
    for (u64 idx = 0; idx < 64; ++idx) {
        auto f = decode_strategy(idx, 3, 2);
        REQUIRE(f.size() == 2);
        for (auto& fe : f)
            for (u64 y = 0; y < 3; ++y) CHECK(fe[y] != y);
    }
}

TEST_CASE("distance scan: frozen exact values at p = 3, n = 2") {
    ScanResult u = nm_distance_scan(3, 2, proto::source_uniform(9), 0, 1);
    CHECK(u.rows.size() == 8);
    CHECK(u.strategies_total == 8.0);
    CHECK(!u.sampled);
    // uniform X: every fixed-point-free strategy lands exactly on (p-1)/(s p)
    for (const ScanRow& r : u.rows) CHECK(r.distance == rat(2, 9));
    CHECK(u.max_distance == rat(2, 9));
    CHECK(u.mean_distance == rat(2, 9));
    CHECK(u.hmin == doctest::Approx(std::log2(9.0)).epsilon(1e-12));
    CHECK(u.threshold_bits > 0);

    // constant X: (Z, Z') is deterministic given Y, distance 1 - 1/p
    ScanResult c = nm_distance_scan(3, 2, proto::source_constant(9, 4), 0, 1);
    for (const ScanRow& r : c.rows) CHECK(r.distance == rat(2, 3));
}

TEST_CASE("structured path agrees with the independent oracle bit-exactly") {
    const proto::ClassicalSource sources[] = {
        proto::source_uniform(9),
        proto::source_constant(9, 4),
        proto::source_half_support(9),
    };
    for (const auto& src : sources)
        for (u64 idx = 0; idx < 8; ++idx) {
            auto f = decode_strategy(idx, 3, 1);
            CHECK(nm_distance_structured(3, 2, src, f) ==
                  nm_distance_oracle(3, 2, src, f));
        }
    // the oracle is deliberately limited to single-symbol seeds
    auto f = decode_strategy(0, 9, 1);
    CHECK_THROWS_AS(nm_distance_oracle(3, 4, proto::source_uniform(81), f),
                    DomainError);
}

TEST_CASE("support growth: wider sources cannot look less uniform here") {
    // reported observation, not a theorem: at p = 3, n = 2 the max distance is
    // monotone in support size for the stock families
    ScanResult full = nm_distance_scan(3, 2, proto::source_uniform(9), 0, 1);
    ScanResult half = nm_distance_scan(3, 2, proto::source_half_support(9), 0, 1);
    ScanResult point = nm_distance_scan(3, 2, proto::source_constant(9, 0), 0, 1);
    MESSAGE("max distance: support 9 -> ", rat_str(full.max_distance),
            ", support 5 -> ", rat_str(half.max_distance), ", support 1 -> ",
            rat_str(point.max_distance));
    CHECK(full.max_distance <= half.max_distance);
    CHECK(half.max_distance <= point.max_distance);
}

TEST_CASE("sampled scans are seeded and reproducible") {
    ScanResult a = nm_distance_scan(5, 2, proto::source_uniform(25), 40, 9);
    CHECK(a.sampled);
    CHECK(a.sample_size == 40);
    CHECK(a.rows.size() == 40);
    for (const ScanRow& r : a.rows) CHECK(r.distance == rat(4, 25));

    ScanResult b = nm_distance_scan(5, 2, proto::source_uniform(25), 40, 9);
    REQUIRE(b.rows.size() == a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].f_index == b.rows[i].f_index);
        CHECK(a.rows[i].distance == b.rows[i].distance);
    }
}

TEST_CASE("exhaustive scan refuses oversized strategy spaces") {
    try {
        nm_distance_scan(5, 4, proto::source_uniform(625), 0, 1);
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("use a sample") != std::string::npos);
    }
}

TEST_CASE("xor sweep: clean margins and a quiet rational oracle") {
    SweepSummary s = xor_sweep(11, 5);
    CHECK(s.cases == 60); // 6 configs x 5 states x 2 variants
    CHECK(s.rows.size() == 60);
    CHECK(s.violations == 0);
    CHECK(s.min_margin >= -1e-9);
    CHECK(s.max_rat_gap <= 1e-9);
    u64 uniform_rows = 0, nonuniform_rows = 0;
    for (const SweepRow& r : s.rows) {
        if (r.variant == "uniform") ++uniform_rows;
        if (r.variant == "nonuniform") ++nonuniform_rows;
        CHECK(r.margin == doctest::Approx(r.rhs - r.lhs).epsilon(1e-12));
    }
    CHECK(uniform_rows == 30);
    CHECK(nonuniform_rows == 30);

    SweepSummary t = xor_sweep(11, 5);
    REQUIRE(t.rows.size() == s.rows.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        CHECK(t.rows[i].case_id == s.rows[i].case_id);
        CHECK(t.rows[i].lhs == s.rows[i].lhs);
    }
}

TEST_CASE("sandwich sweep: identities hold on random states") {
    SweepSummary s = sandwich_sweep(12, 5);
    CHECK(s.cases == 40); // (4 cq dims + 4 ccq shapes) x 5 states
    CHECK(s.rows.size() == 120);
    CHECK(s.violations == 0);
    CHECK(s.min_margin >= -1e-9);
    CHECK(s.max_residual <= 1e-9);
}

TEST_CASE("game scan: frozen exhaustive census at p = 3, n = 2") {
    GameScanResult g = game_scan(3, 2, 0, 21);
    CHECK(g.functions == 19683); // 3^9 leak maps
    CHECK(!g.sampled);
    CHECK(g.checks == 39366); // a in {1, 2}
    CHECK(g.violations == 0);
    CHECK(g.worst_slack > 0);
    CHECK(g.max_win == rat(7, 9));
    CHECK(g.argmax_function == 377);
    CHECK(g.cross_checked == 65);
    CHECK(g.cross_ok);
}

TEST_CASE("game scan: sampled mode covers the affine family and reproduces") {
    GameScanResult a = game_scan(3, 2, 16, 33);
    CHECK(a.sampled);
    CHECK(a.sample_size == 16);
    CHECK(a.functions == 43); // 27 affine + 16 sampled
    CHECK(a.violations == 0);
    CHECK(a.cross_ok);

    GameScanResult b = game_scan(3, 2, 16, 33);
    CHECK(b.max_win == a.max_win);
    CHECK(b.argmax_function == a.argmax_function);
    CHECK(b.worst_slack == a.worst_slack);

    CHECK_THROWS_AS(game_scan(5, 2, 0, 1), ResourceError); // 5^25 maps
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "catwalk/errors.hpp"
#include "catwalk/parallel.hpp"
#include "catwalk/scaling.hpp"

using namespace catwalk;

TEST_CASE("schedules")
{
    ScalingExtras e;
    e.p = 0.5;
    auto const p1 = build_schedule(Regime::P1, 100, e);
    CHECK(p1.params.c == doctest::Approx(0.01));
    CHECK(p1.x0 == 100);

    ScalingExtras e2;
    e2.c = 0.5;
    e2.y = 1.0;
    auto const p2 = build_schedule(Regime::P2, 1000, e2);
    CHECK(p2.params.p == doctest::Approx(0.999));
    CHECK(p2.x0 == 1000);
    CHECK(p2.time_scale == 1000);
    CHECK(p2.space_scale == 1000);
    CHECK(limit_for(p2).kind == CadlagKind::Pdmp);

    ScalingExtras e4;
    e4.alpha = 0.5;
    e4.r = 0.5;
    e4.y = 0.3;
    auto const p4 = build_schedule(Regime::P4, 10000, e4);
    CHECK(p4.params.p == doctest::Approx(0.99));
    CHECK(p4.params.c == doctest::Approx(0.01));
    CHECK(p4.centering == 5000);
    CHECK(p4.x0 == 5030);
    CHECK(p4.time_scale == doctest::Approx(100));
    CHECK(limit_for(p4).parameter == 0.5);

    ScalingExtras e5;
    e5.gamma = 1.0;
    e5.r = 3.0;
    e5.k = 2;
    auto const p5 = build_schedule(Regime::P5, 10000, e5);
    CHECK(p5.params.p == doctest::Approx(1e-4));
    CHECK(p5.params.c == doctest::Approx(1e-8));
    CHECK(p5.x0 == 30002);
    CHECK(p5.time_scale == doctest::Approx(1e4));
    CHECK(p5.space_scale == 1.0);
    CHECK(limit_for(p5).kind == CadlagKind::Walk);
    CHECK(to_string(Regime::P4) == "P4");
}

TEST_CASE("schedule errors")
{
    ScalingExtras none;
    CHECK_THROWS_AS(build_schedule(Regime::P2, 100, none), ParameterError);
    ScalingExtras e;
    e.c = 0.5;
    e.y = 1.0;
    CHECK_THROWS_AS(build_schedule(Regime::P2, 1.0, e), ParameterError);
    e.y = -1.0;
    CHECK_THROWS_AS(build_schedule(Regime::P2, 100, e), ParameterError);
    ScalingExtras e4;
    e4.alpha = 1.5;
    e4.r = 1.0;
    e4.y = 0.0;
    CHECK_THROWS_AS(build_schedule(Regime::P4, 100, e4), ParameterError);
    ScalingExtras p;
    p.p = 0.5;
    CHECK_THROWS_AS(limit_for(build_schedule(Regime::P1, 100, p)), ParameterError);
}

TEST_CASE("rescaled marginals at t = 0 are the rescaled start")
{
    ScalingExtras e;
    e.c = 0.5;
    e.y = 1.0;
    auto const s = build_schedule(Regime::P2, 1000, e);
    auto const m = rescaled_marginals(s, {0.0, 1.0}, 50, 1);
    REQUIRE(m.size() == 2);
    for (double v : m[0])
    {
        CHECK(v == 1.0);
    }
    CHECK(m[1].size() == 50);
}

TEST_CASE("marginals do not depend on the worker count")
{
    ScalingExtras e;
    e.c = 0.5;
    e.y = 1.0;
    auto const s = build_schedule(Regime::P2, 1000, e);
    set_worker_count(1);
    auto const a = rescaled_marginals(s, {0.5, 2.0}, 300, 9);
    auto const la = limit_marginals(limit_for(s), {0.5, 2.0}, 300, 9);
    set_worker_count(5);
    auto const b = rescaled_marginals(s, {0.5, 2.0}, 300, 9);
    auto const lb = limit_marginals(limit_for(s), {0.5, 2.0}, 300, 9);
    set_worker_count(0);
    CHECK(a == b);
    CHECK(la == lb);
}

TEST_CASE("prop2 comparison at small size")
{
    ComparisonOptions o;
    o.calibration_trials = 10;
    o.null_passes_required = 8;
    o.power_failures_required = 8;
    auto const r = compare_prop2(0.5, 1.0, {100, 10000}, {1.0}, 5000, 3, o);
    CHECK(r.ks_table.size() == 2);
    CHECK(r.trends.size() == 1);
    REQUIRE(r.null_calibration);
    REQUIRE(r.power);
    CHECK(r.null_calibration->ok);
    CHECK(r.power->ok);
    CHECK(r.ks_table[1].ks.value < 0.05);
    CHECK(r.pass);
}

TEST_CASE("bulk drop concentrates at r")
{
    auto const checks = bulk_concentration_checks(0.5, 1.0, {100, 1000, 10000}, 5000, 4);
    REQUIRE(checks.size() == 4);
    for (auto const& c : checks)
    {
        CHECK(c.report.pass);
    }
}

TEST_CASE("prop4 drift is 1 - r")
{
    ComparisonOptions o;
    o.run_calibration = false;
    auto const r = compare_prop4(0.5, 2.0, 0.0, {10000}, {1.0}, 5000, 5, o);
    bool found = false;
    for (auto const& c : r.checks)
    {
        if (c.name.rfind("drift", 0) == 0)
        {
            found = true;
            CHECK(c.report.pass);
        }
    }
    CHECK(found);
    CHECK(r.ks_table.front().wasserstein < 0.2);
}

TEST_CASE("first move")
{
    Stream s(6, 0);
    auto const stuck = first_move({0.5, 0.5}, 0, 100, s);
    CHECK(stuck.censored);
    auto const quick = first_move({0.999999, 0.5}, 5, 100, s);
    CHECK_FALSE(quick.censored);
    CHECK(quick.jump == 1);
    auto const capped = first_move({1e-9, 1e-9}, 1, 10, s);
    CHECK(capped.censored);
    CHECK(capped.holding_steps == 10);
}

TEST_CASE("two-clock move with no catastrophe mass is a birth")
{
    Stream s(7, 0);
    auto const m = sample_two_clock(100, 1.0, 0, s);
    CHECK(m.jump == 1);
    CHECK(m.holding_steps >= 1);
}

TEST_CASE("prop5 at moderate size")
{
    auto const r = compare_prop5(1.0, 1.0, 0, 1000, 4000, 8);
    CHECK(r.censored == 0);
    CHECK(r.holding_ks.pass);
    CHECK(r.right_pass);
    CHECK(r.big_left_pass);
    CHECK(r.pass);
    // r = 0 needs k >= 1 or the start is absorbing.
    auto const zero = compare_prop5(1.0, 0.0, 3, 1000, 2000, 9);
    CHECK(zero.right_expected == 1.0);
    CHECK(zero.right_frequency > 0.99);
    CHECK_THROWS_AS(compare_prop5(1.0, 0.0, 0, 1000, 100, 9), ParameterError);
}

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "catwalk/chains.hpp"
#include "catwalk/errors.hpp"
#include "catwalk/stats.hpp"
#include "oracles.hpp"

using namespace catwalk;

TEST_CASE("metastable level")
{
    CHECK(metastable_level({0.99, 0.1}) == doctest::Approx(990.0));
    CHECK(metastable_level({0.5, 0.5}) == doctest::Approx(2.0));
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(validate({0.0, 0.5}), ParameterError);
    CHECK_THROWS_AS(validate({1.0, 0.5}), ParameterError);
    CHECK_THROWS_AS(validate({0.5, 0.0}), ParameterError);
    CHECK_THROWS_AS(validate({0.5, 1.0}), ParameterError);
    CHECK_NOTHROW(validate({0.5, 1.0}, true));
    CHECK_THROWS_AS(simulate(ChainKind::X, {0.5, 0.5}, -1, 5, {1, 0}), DomainError);
    CHECK_THROWS_AS(simulate(ChainKind::X, {0.5, 0.5}, 1, -1, {1, 0}), ParameterError);
    CHECK_THROWS_AS(simulate(ChainKind::X, {0.5, 0.5}, 1, kMaxStoredSteps + 1, {1, 0}),
                    ParameterError);
    CHECK_THROWS_AS(simulate(ChainKind::MaxExtrema, {0.5, 0.5}, 1, 5, {1, 0}),
                    ParameterError);
}

TEST_CASE("single steps")
{
    Stream s(3, 0);
    ChainParams const params{0.5, 0.5};
    CHECK(step_x(0, params, s) == 0);
    CHECK_THROWS_AS(step_x(-1, params, s), DomainError);
    CHECK_THROWS_AS(step_u(-1, params, s), DomainError);
    for (int i = 0; i < 1000; ++i)
    {
        auto const next = step_x(5, params, s);
        CHECK((next == 6 || (next >= 0 && next <= 5)));
    }
    // c = 1 empties the population on every catastrophe.
    ChainParams const wipe{0.5, 1.0};
    for (int i = 0; i < 100; ++i)
    {
        auto const next = step_x(7, wipe, s);
        CHECK((next == 8 || next == 0));
    }
}

TEST_CASE("X is absorbed at zero")
{
    auto const path = simulate(ChainKind::X, {0.2, 0.9}, 3, 2000, {5, 0});
    REQUIRE(path.values.size() == 2001);
    bool absorbed = false;
    for (auto v : path.values)
    {
        CHECK(v >= 0);
        if (absorbed)
        {
            CHECK(v == 0);
        }
        absorbed = absorbed || v == 0;
    }
    CHECK(absorbed);
    auto const t = absorption_time({0.2, 0.9}, 3, 2000, {5, 0});
    REQUIRE(t.has_value());
    CHECK(path.values[static_cast<std::size_t>(*t)] == 0);
    CHECK(path.values[static_cast<std::size_t>(*t - 1)] > 0);
    CHECK(absorption_time({0.2, 0.9}, 0, 10, {5, 0}) == 0);
}

namespace
{
// Stationary moments of X ignoring absorption: E X' = E X and E X'^2 = E X^2
// give v = (p(2m+1) + (1-p)c(1-c)m) / ((1-p)c(2-c)) - m^2. The lag-one
// autocorrelation is rho = 1 - (1-p)c, so an N-step average has variance
// about v (1+rho) / ((1-rho) N).
double window_mean_sd(double p, double c, double steps)
{
    double const m = p / ((1 - p) * c);
    double const second = (p * (2 * m + 1) + (1 - p) * c * (1 - c) * m) / ((1 - p) * c * (2 - c));
    double const v = second - m * m;
    double const rho = 1 - (1 - p) * c;
    return std::sqrt(v * (1 + rho) / ((1 - rho) * steps));
}
}  // namespace

TEST_CASE("Figure 1 path drops fast and settles near 990")
{
    auto const path = simulate(ChainKind::X, {0.99, 0.1}, 2000, 100000, {7, 0});
    CHECK(path.values.size() == 100001);
    CHECK(path.values.front() == 2000);
    double mean = 0;
    for (std::size_t n = 20000; n < path.values.size(); ++n)
    {
        mean += static_cast<double>(path.values[n]);
    }
    mean /= static_cast<double>(path.values.size() - 20000);
    double const sd = window_mean_sd(0.99, 0.1, 80001);
    CHECK(sd == doctest::Approx(36.2).epsilon(0.01));
    CHECK(std::abs(mean - 990.0) < 4 * sd);
    auto const summary = summarize_x({0.99, 0.1}, 2000, 100000, {7, 0}, 20000, 940, 1040);
    CHECK(summary.window_mean == doctest::Approx(mean).epsilon(1e-12));
    REQUIRE(summary.first_band_entry.has_value());
    CHECK(*summary.first_band_entry < 20000);
    CHECK_FALSE(summary.absorption_step.has_value());
    CHECK(summary.final_value == path.values.back());
    CHECK(summary.min_value >= 0);
    CHECK(summary.max_value >= 2000);
}

TEST_CASE("Figure 1 window means scatter as the stationary moments predict")
{
    std::vector<double> means;
    for (std::uint64_t i = 0; i < 400; ++i)
    {
        means.push_back(summarize_x({0.99, 0.1}, 2000, 100000, {17, i}, 20000, 940, 1040).window_mean);
    }
    auto const m = moments(means);
    double const sd = window_mean_sd(0.99, 0.1, 80001);
    CHECK(std::abs(m.mean - 990.0) <= 4 * sd / 20);
    CHECK(std::sqrt(m.variance) == doctest::Approx(sd).epsilon(0.2));
}

TEST_CASE("zero steps gives the start only")
{
    auto const path = simulate(ChainKind::X, {0.5, 0.5}, 4, 0, {1, 0});
    CHECK(path.values == std::vector<std::int64_t>{4});
}

TEST_CASE("simulate is reproducible")
{
    auto const a = simulate(ChainKind::Y, {0.7, 0.3}, 5, 500, {9, 2});
    auto const b = simulate(ChainKind::Y, {0.7, 0.3}, 5, 500, {9, 2});
    auto const c = simulate(ChainKind::Y, {0.7, 0.3}, 5, 500, {9, 3});
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("Y can go negative and U escapes are flagged")
{
    // Large p/(1-p) drives Y below zero quickly.
    auto const y = simulate(ChainKind::Y, {0.9, 0.5}, 0, 200, {4, 0});
    bool negative = false;
    for (auto v : y.values)
    {
        negative = negative || v < 0;
    }
    CHECK(negative);

    bool escaped_any = false;
    for (std::uint64_t i = 0; i < 200 && !escaped_any; ++i)
    {
        auto const u = simulate(ChainKind::U, {0.1, 0.9}, 2, 50, {4, i});
        if (u.escaped)
        {
            escaped_any = true;
            CHECK(u.values.back() < 0);
            CHECK(u.values.size() < 51);
        }
        else
        {
            for (auto v : u.values)
            {
                CHECK(v >= 0);
            }
        }
    }
    CHECK(escaped_any);
}

TEST_CASE("extrema recursions")
{
    Stream a(8, 0);
    Stream b(8, 0);
    double const e = draw_exponential(b, 1.0);
    CHECK(step_extrema(2.0, Extremum::Max, 0.25, a) == 0.75 * 2.0 + e);
    double const e2 = draw_exponential(b, 1.0);
    CHECK(step_extrema(2.0, Extremum::Min, 0.25, a) == 0.75 * (2.0 + e2));
    CHECK_THROWS_AS(step_extrema(-1.0, Extremum::Max, 0.5, a), ParameterError);
    CHECK_THROWS_AS(step_extrema(1.0, Extremum::Max, 0.0, a), ParameterError);
}

namespace
{
oracle::Pmf empirical_x(ChainParams const& params,
                        std::int64_t x0,
                        std::int64_t steps,
                        std::int64_t reps,
                        std::uint64_t seed)
{
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t r = 0; r < reps; ++r)
    {
        Stream s(seed, static_cast<std::uint64_t>(r));
        std::int64_t k = x0;
        for (std::int64_t n = 0; n < steps; ++n)
        {
            k = step_x(k, params, s);
        }
        ++counts[k];
    }
    oracle::Pmf out;
    for (auto const& [k, m] : counts)
    {
        out[k] = static_cast<double>(m) / static_cast<double>(reps);
    }
    return out;
}
}  // namespace

TEST_CASE("simulated X matches the enumeration oracle")
{
    std::int64_t const reps = 1'000'000;
    auto const law = oracle::chain_law(0.5, 0.5, 2, 2);
    auto const mc = empirical_x({0.5, 0.5}, 2, 2, reps, 31);
    for (auto const& [k, p] : law)
    {
        double const got = mc.count(k) ? mc.at(k) : 0.0;
        CHECK(std::abs(got - p) <= 4 * std::sqrt(p * (1 - p) / reps));
    }
    CHECK(oracle::tv(mc, law) < 0.003);
}

TEST_CASE("mode sampler has the law of step-by-step simulation")
{
    ChainParams const params{0.6, 0.3};
    std::vector<std::int64_t> const steps{0, 1, 3, 6};
    std::int64_t const reps = 400000;
    std::vector<std::map<std::int64_t, std::int64_t>> counts(steps.size());
    for (std::int64_t r = 0; r < reps; ++r)
    {
        Stream s(41, static_cast<std::uint64_t>(r));
        auto const values = sample_x_at_steps(params, 3, steps, s);
        REQUIRE(values.size() == steps.size());
        for (std::size_t i = 0; i < steps.size(); ++i)
        {
            ++counts[i][values[i]];
        }
    }
    CHECK(counts[0][3] == reps);
    for (std::size_t i = 1; i < steps.size(); ++i)
    {
        auto const law = oracle::chain_law(0.6, 0.3, 3, static_cast<int>(steps[i]));
        for (auto const& [k, p] : law)
        {
            double const got = static_cast<double>(counts[i][k]) / reps;
            CHECK(std::abs(got - p) <= 4.5 * std::sqrt(p * (1 - p) / reps) + 1e-12);
        }
    }
}

TEST_CASE("mode sampler at large horizons agrees with the kernel oracle")
{
    ChainParams const params{0.9, 0.05};
    std::int64_t const steps = 60;
    auto const exact = exact_distribution(params, 20, steps, 100);
    std::int64_t const reps = 200000;
    std::vector<std::int64_t> const at{steps};
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t r = 0; r < reps; ++r)
    {
        Stream s(42, static_cast<std::uint64_t>(r));
        ++counts[sample_x_at_steps(params, 20, at, s).front()];
    }
    oracle::Pmf mc;
    for (auto const& [k, m] : counts)
    {
        mc[k] = static_cast<double>(m) / reps;
    }
    CHECK(oracle::tv(mc, exact) < 0.02);
    Stream bad(1, 0);
    CHECK_THROWS_AS(sample_x_at_steps(params, 20, std::vector<std::int64_t>{3, 1}, bad),
                    ParameterError);
}

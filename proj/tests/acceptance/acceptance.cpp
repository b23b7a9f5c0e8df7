// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "catwalk/chains.hpp"
#include "catwalk/cli.hpp"
#include "catwalk/coupling.hpp"
#include "catwalk/invariance.hpp"
#include "catwalk/parallel.hpp"
#include "catwalk/scaling.hpp"
#include "catwalk/stats.hpp"

using namespace catwalk;

namespace
{
constexpr std::uint64_t kSeed = 20190417;

// Criterion 1
constexpr double kFig1P = 0.99;
constexpr double kFig1C = 0.1;
constexpr std::int64_t kFig1X0 = 2000;
constexpr std::int64_t kFig1Steps = 100'000;
constexpr std::int64_t kFig1WindowBegin = 20'000;
constexpr double kFig1Target = 990.0;
constexpr double kFig1RelTol = 0.05;
constexpr std::int64_t kFig1BandLow = 940;
constexpr std::int64_t kFig1BandHigh = 1040;
constexpr std::int64_t kFig1EntryBy = 20'000;
constexpr int kFig1Runs = 100;
constexpr int kFig1Required = 95;
constexpr double kFig1Budget = 10.0;

// Criterion 2
constexpr double kProp1P = 0.5;
constexpr std::int64_t kProp1T = 50;
constexpr std::int64_t kProp1Reps = 2000;
constexpr double kProp1Budget = 60.0;

// Criterion 3
constexpr double kTvBudget = 5.0;

// Criterion 4
constexpr std::int64_t kProp2Reps = 10'000;
constexpr double kProp2Budget = 300.0;

// Criterion 5
constexpr double kLaplaceTol = 1e-10;
constexpr std::int64_t kProp3Reps = 10'000;
constexpr std::int64_t kProp3Samples = 1'000'000;
constexpr double kProp3Budget = 120.0;

// Criterion 6
constexpr double kProp4KsCap = 0.05;
constexpr std::int64_t kProp4Reps = 10'000;
constexpr double kProp4Budget = 300.0;

// Criterion 7
constexpr std::int64_t kProp5Reps = 10'000;
constexpr double kProp5Budget = 120.0;

// Criterion 8
constexpr std::int64_t kOracleReps = 1'000'000;
constexpr double kOracleSigmas = 4.0;
constexpr double kOracleTv = 0.003;
constexpr double kOracleBudget = 120.0;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome figure1()
{
    auto const start = std::chrono::steady_clock::now();
    std::uint64_t const master = derive_seed(kSeed, "acceptance/figure1");
    std::vector<char> ok(kFig1Runs, 0);
    std::vector<char> entered(kFig1Runs, 0);
    std::vector<double> means(kFig1Runs, 0.0);
    parallel_for(kFig1Runs, [&](std::int64_t i) {
        auto const s = summarize_x({kFig1P, kFig1C}, kFig1X0, kFig1Steps,
                                   {master, static_cast<std::uint64_t>(i)}, kFig1WindowBegin,
                                   kFig1BandLow, kFig1BandHigh);
        bool const in_mean = std::abs(s.window_mean - kFig1Target) <= kFig1RelTol * kFig1Target;
        bool const in_band = s.first_band_entry && *s.first_band_entry <= kFig1EntryBy;
        auto const k = static_cast<std::size_t>(i);
        ok[k] = in_mean && in_band;
        entered[k] = in_band;
        means[k] = s.window_mean;
    });
    int good = 0;
    int band = 0;
    for (int i = 0; i < kFig1Runs; ++i)
    {
        good += ok[static_cast<std::size_t>(i)];
        band += entered[static_cast<std::size_t>(i)];
    }
    auto const m = moments(means);
    double const t = elapsed(start);
    return {good >= kFig1Required && t < kFig1Budget,
            fmt("%d/%d runs meet both conditions (need %d); %d entered the band; "
                "window means %.1f +- %.1f sd; %.1f s",
                good, kFig1Runs, kFig1Required, band, m.mean, std::sqrt(m.variance), t)};
}

Outcome prop1()
{
    auto const start = std::chrono::steady_clock::now();
    auto const study = verify_prop1(kProp1P, kProp1T, {100, 1000, 10000}, kProp1Reps,
                                    derive_seed(kSeed, "acceptance/prop1"));
    double const t = elapsed(start);
    std::string detail = "p_hat by L:";
    for (auto const& row : study.rows)
    {
        detail += fmt(" %g:%.4f[%.4f,%.4f]", row.L, row.p_hat, row.ci_low, row.ci_high);
    }
    detail += fmt("; non-increasing=%d, below %.2f=%d; %.1f s", study.non_increasing, study.cap,
                  study.below_cap, t);
    return {study.pass && t < kProp1Budget, detail};
}

Outcome tv_bounds()
{
    auto const start = std::chrono::steady_clock::now();
    int bin_cases = 0;
    int bin_violations = 0;
    double worst_ratio = 0;
    int le_cam_violations = 0;
    for (double c : {0.001, 0.01, 0.1})
    {
        for (std::int64_t x = 1; x <= 50; ++x)
        {
            double const mean = static_cast<double>(x) * c;
            auto const poisson = poisson_pmf(mean);
            double const tv = tv_integer(binomial_pmf(x, c), poisson.pmf) + poisson.dropped_mass;
            double const bound = 0.5 * static_cast<double>(x) * c * c;
            ++bin_cases;
            if (tv > bound)
            {
                ++bin_violations;
                worst_ratio = std::max(worst_ratio, tv / bound);
            }
            le_cam_violations += tv > static_cast<double>(x) * c * c ? 1 : 0;
        }
    }
    std::vector<double> const means{0.0, 0.1, 0.5, 1.0, 1.1, 1.25, 2.0, 5.0, 10.0, 20.0};
    int pp_cases = 0;
    int pp_violations = 0;
    for (double l : means)
    {
        for (double m : means)
        {
            auto const a = poisson_pmf(l);
            auto const b = poisson_pmf(m);
            double const tv = tv_integer(a.pmf, b.pmf) + std::max(a.dropped_mass, b.dropped_mass);
            ++pp_cases;
            pp_violations += tv > std::abs(l - m) + 1e-15 ? 1 : 0;
        }
    }
    double const t = elapsed(start);
    return {bin_violations == 0 && pp_violations == 0 && t < kTvBudget,
            fmt("binomial-poisson: %d/%d grid points exceed x c^2/2 (worst ratio %.3f), "
                "%d exceed x c^2; poisson-poisson: %d/%d exceed |l-m|; %.2f s",
                bin_violations, bin_cases, worst_ratio, le_cam_violations, pp_violations,
                pp_cases, t)};
}

Outcome prop2()
{
    auto const start = std::chrono::steady_clock::now();
    auto const r = compare_prop2(0.5, 1.0, {100, 1000, 10000}, {0.5, 1, 2}, kProp2Reps,
                                 derive_seed(kSeed, "acceptance/prop2"));
    double const t = elapsed(start);
    std::string detail = "KS at L=1e4:";
    for (auto const& cell : r.ks_table)
    {
        if (cell.L == 10000)
        {
            detail += fmt(" t=%g:%.4f", cell.t, cell.ks.value);
        }
    }
    bool trends = true;
    for (auto const& v : r.trends)
    {
        trends = trends && v.non_increasing;
    }
    detail += fmt("; trends=%d; null", trends);
    for (auto const& [tt, n] : r.null_calibration->counts)
    {
        detail += fmt(" %lld", static_cast<long long>(n));
    }
    detail += "/100 pass; power";
    for (auto const& [tt, n] : r.power->counts)
    {
        detail += fmt(" %lld", static_cast<long long>(n));
    }
    detail += fmt("/100 reject; %.1f s", t);
    return {r.pass && t < kProp2Budget, detail};
}

Outcome prop3()
{
    auto const start = std::chrono::steady_clock::now();
    bool laplace = true;
    double worst_residual = 0;
    for (auto const& row : laplace_table({0.1, 0.5, 0.9}, {0.1, 1, 10}, 200, kLaplaceTol))
    {
        laplace = laplace && row.pass;
        worst_residual = std::max(worst_residual, row.residual);
    }
    bool moments_ok = true;
    bool stationary = true;
    bool identity = true;
    std::string extra;
    for (double c : {0.1, 0.5, 0.9})
    {
        InvarianceOptions o;
        o.mc_samples = kProp3Samples;
        auto const r = verify_invariance(c, kProp3Reps,
                                         derive_seed(kSeed, fmt("acceptance/prop3/c=%g", c)), o);
        moments_ok = moments_ok && r.moments.mean_pass && r.moments.variance_pass;
        for (auto const& ch : r.checks)
        {
            if (ch.name.rfind("stationarity", 0) == 0)
            {
                stationary = stationary && ch.report.pass;
            }
            else if (ch.name == "min_plus_exp_equals_max")
            {
                identity = identity && ch.report.pass;
            }
            else if (!ch.report.pass)
            {
                extra += fmt(" [c=%g %s failed]", c, ch.name.c_str());
            }
        }
    }
    double const t = elapsed(start);
    return {laplace && moments_ok && stationary && identity && t < kProp3Budget,
            fmt("(a) laplace=%d max residual %.2e; (b) moments=%d; (c) stationarity=%d; "
                "(d) m+E=M=%d;%s %.1f s",
                laplace, worst_residual, moments_ok, stationary, identity,
                extra.empty() ? "" : (extra + ";").c_str(), t)};
}

Outcome prop4()
{
    auto const start = std::chrono::steady_clock::now();
    ComparisonOptions o;
    o.ks_cap = kProp4KsCap;
    o.run_calibration = false;
    bool ks_ok = true;
    bool drift_ok = true;
    bool bulk_ok = true;
    std::string detail;
    for (double r : {0.5, 1.0, 2.0})
    {
        auto const rep = compare_prop4(0.5, r, 0.0, {10000}, {1.0}, kProp4Reps,
                                       derive_seed(kSeed, fmt("acceptance/prop4/r=%g", r)), o);
        auto const& cell = rep.ks_table.front();
        ks_ok = ks_ok && cell.ks.value < kProp4KsCap;
        for (auto const& ch : rep.checks)
        {
            if (ch.name.rfind("drift", 0) == 0)
            {
                drift_ok = drift_ok && ch.report.pass;
            }
            if (ch.name.rfind("bulk", 0) == 0)
            {
                bulk_ok = bulk_ok && ch.report.pass;
            }
        }
        detail += fmt("r=%g KS %.4f W1 %.4f; ", r, cell.ks.value, cell.wasserstein);
    }
    double const t = elapsed(start);
    detail += fmt("KS<%.2f=%d drift=%d bulk=%d; %.1f s", kProp4KsCap, ks_ok, drift_ok, bulk_ok, t);
    return {ks_ok && drift_ok && bulk_ok && t < kProp4Budget, detail};
}

Outcome prop5()
{
    auto const start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (double r : {1.0, 3.0})
    {
        auto const rep = compare_prop5(1.0, r, 0, 10000, kProp5Reps,
                                       derive_seed(kSeed, fmt("acceptance/prop5/r=%g", r)));
        ok = ok && rep.pass;
        detail += fmt("r=%g KS %.4f<=%.4f right %.4f in [%.4f,%.4f] vs %.4f, big-left %.4f<=%.4f; ",
                      r, rep.holding_ks.value, rep.holding_ks.threshold, rep.right_frequency,
                      rep.right_ci_low, rep.right_ci_high, rep.right_expected,
                      rep.big_left_frequency, rep.big_left_threshold);
    }
    double const t = elapsed(start);
    detail += fmt("%.1f s", t);
    return {ok && t < kProp5Budget, detail};
}

Outcome oracle()
{
    auto const start = std::chrono::steady_clock::now();
    std::vector<std::int64_t> const horizons{1, 2, 4};
    int cases = 0;
    int failures = 0;
    double worst_tv = 0;
    double worst_z = 0;
    for (double p : {0.3, 0.5, 0.8})
    {
        for (double c : {0.2, 0.5})
        {
            for (std::int64_t x0 : {1, 3})
            {
                ChainParams const params{p, c};
                std::uint64_t const master
                    = derive_seed(kSeed, fmt("acceptance/oracle/p=%g/c=%g/x0=%lld", p, c,
                                             static_cast<long long>(x0)));
                // counts[h][state]
                std::vector<std::vector<std::int64_t>> counts(
                    horizons.size(), std::vector<std::int64_t>(static_cast<std::size_t>(x0 + 5), 0));
                std::vector<std::vector<std::int64_t>> finals(
                    static_cast<std::size_t>(kOracleReps), std::vector<std::int64_t>(horizons.size()));
                parallel_for(kOracleReps, [&](std::int64_t r) {
                    Stream s(master, static_cast<std::uint64_t>(r));
                    std::int64_t k = x0;
                    std::size_t h = 0;
                    for (std::int64_t n = 1; n <= horizons.back(); ++n)
                    {
                        k = step_x(k, params, s);
                        if (n == horizons[h])
                        {
                            finals[static_cast<std::size_t>(r)][h++] = k;
                        }
                    }
                });
                for (auto const& f : finals)
                {
                    for (std::size_t h = 0; h < horizons.size(); ++h)
                    {
                        ++counts[h][static_cast<std::size_t>(f[h])];
                    }
                }
                for (std::size_t h = 0; h < horizons.size(); ++h)
                {
                    ++cases;
                    auto const exact = exact_distribution(params, x0, horizons[h], x0 + 5);
                    Pmf empirical;
                    bool ok = true;
                    for (std::size_t k = 0; k < counts[h].size(); ++k)
                    {
                        auto const key = static_cast<std::int64_t>(k);
                        double const want = exact.count(key) ? exact.at(key) : 0.0;
                        double const got = static_cast<double>(counts[h][k]) / kOracleReps;
                        if (counts[h][k] > 0)
                        {
                            empirical[key] = got;
                        }
                        double const sigma = std::sqrt(want * (1 - want) / kOracleReps);
                        if (sigma == 0.0)
                        {
                            ok = ok && got == want;
                        }
                        else
                        {
                            double const z = std::abs(got - want) / sigma;
                            worst_z = std::max(worst_z, z);
                            ok = ok && z <= kOracleSigmas;
                        }
                    }
                    double const tv = tv_integer(empirical, exact);
                    worst_tv = std::max(worst_tv, tv);
                    ok = ok && tv < kOracleTv;
                    failures += ok ? 0 : 1;
                }
            }
        }
    }
    double const t = elapsed(start);
    return {failures == 0 && t < kOracleBudget,
            fmt("%d/%d (p,c,x0,T) cases match; worst |z| %.2f, worst TV %.5f; %.1f s",
                cases - failures, cases, worst_z, worst_tv, t)};
}

std::pair<int, std::string> cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "catwalk");
    std::vector<char const*> argv;
    for (auto const& a : args)
    {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    int const code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str()};
}

Outcome determinism()
{
    auto const start = std::chrono::steady_clock::now();
    std::vector<std::vector<std::string>> const commands{
        {"simulate", "--p", "0.7", "--c", "0.3", "--x0", "10", "--steps", "20000"},
        {"simulate", "--p", "0.7", "--c", "0.3", "--x0", "10", "--steps", "2000", "--format", "json"},
        {"figure1"},
        {"figure1", "--format", "json"},
        {"verify", "1", "--reps", "500"},
        {"verify", "1", "--reps", "500", "--format", "csv"},
        {"verify", "2", "--reps", "1000"},
        {"verify", "3", "--reps", "2000", "--samples", "20000"},
        {"verify", "4", "--reps", "1000", "--L", "100,1000"},
        {"verify", "5", "--reps", "1000", "--L", "1000"},
        {"invariant", "--samples", "20000"},
        {"invariant", "--samples", "20000", "--format", "csv"},
    };
    int same = 0;
    for (auto cmd : commands)
    {
        cmd.insert(cmd.end(), {"--seed", "42"});
        auto with = [&](char const* threads) {
            auto c = cmd;
            c.insert(c.end(), {"--threads", threads});
            return cli(c);
        };
        auto const a = with("1");
        auto const b = with("1");
        auto const c = with("3");
        auto const d = with("8");
        bool const ok = !a.second.empty() && a == b && a == c && a == d;
        same += ok ? 1 : 0;
    }
    set_worker_count(0);
    double const t = elapsed(start);
    return {same == static_cast<int>(commands.size()),
            fmt("%d/%zu commands byte-identical across reruns and 1, 3, 8 workers; %.1f s", same,
                commands.size(), t)};
}
}  // namespace

int main()
{
    std::vector<std::pair<char const*, std::function<Outcome()>>> const criteria{
        {"figure 1 reproduction", figure1},
        {"coupling decay", prop1},
        {"TV bounds as exact inequalities", tv_bounds},
        {"PDMP marginal convergence", prop2},
        {"invariant-law suite", prop3},
        {"drifted limit", prop4},
        {"walk limit first move", prop5},
        {"oracle equivalence", oracle},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        auto const outcome = criteria[i].second();
        failed += outcome.pass ? 0 : 1;
        std::printf("criterion %zu [%s]: %s - %s\n", i + 1, criteria[i].first,
                    outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria pass\n", criteria.size() - static_cast<std::size_t>(failed),
                criteria.size());
    return failed == 0 ? 0 : 1;
}

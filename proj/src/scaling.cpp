#include "catwalk/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "catwalk/errors.hpp"
#include "catwalk/parallel.hpp"

namespace catwalk
{
std::string_view to_string(Regime regime)
{
    switch (regime)
    {
        case Regime::P1:
            return "P1";
        case Regime::P2:
            return "P2";
        case Regime::P4:
            return "P4";
        case Regime::P5:
            return "P5";
    }
    return "?";
}

namespace
{
double need(std::optional<double> const& value, char const* name, Regime regime)
{
    if (!value)
    {
        throw ParameterError(std::string(to_string(regime)) + " schedule needs "
                             + name);
    }
    return *value;
}

std::string label(std::string_view prefix, double L)
{
    return std::string(prefix) + "/L=" + std::to_string(L);
}
}  // namespace

ScalingSchedule build_schedule(Regime regime, double L, ScalingExtras const& extras)
{
    require(L > 1.0 && std::isfinite(L), "build_schedule: L must exceed 1");
    ScalingSchedule s;
    s.regime = regime;
    s.L = L;
    s.extras = extras;
    switch (regime)
    {
        case Regime::P1:
        {
            double const p = need(extras.p, "p", regime);
            require(p > 0.0 && p < 1.0, "P1: p must lie in (0,1)");
            s.params = {p, 1.0 / L};
            s.x0 = std::llround(L * p / (1.0 - p));
            break;
        }
        case Regime::P2:
        {
            double const c = need(extras.c, "c", regime);
            double const y = need(extras.y, "y", regime);
            require(c > 0.0 && c < 1.0, "P2: c must lie in (0,1)");
            require(y >= 0.0, "P2: y must be >= 0");
            s.params = {1.0 - 1.0 / L, c};
            s.x0 = static_cast<std::int64_t>(std::floor(y * L));
            s.time_scale = L;
            s.space_scale = L;
            break;
        }
        case Regime::P4:
        {
            double const alpha = need(extras.alpha, "alpha", regime);
            double const r = need(extras.r, "r", regime);
            double const y = need(extras.y, "y", regime);
            require(alpha > 0.0 && alpha < 1.0, "P4: alpha must lie in (0,1)");
            require(r >= 0.0, "P4: r must be >= 0");
            double const scale = std::pow(L, alpha);
            s.params = {1.0 - 1.0 / scale, std::pow(L, -(1.0 - alpha))};
            s.centering = static_cast<std::int64_t>(std::floor(r * L));
            s.x0 = s.centering + static_cast<std::int64_t>(std::floor(y * scale));
            require(s.x0 >= 0, "P4: initial state is negative");
            s.time_scale = scale;
            s.space_scale = scale;
            break;
        }
        case Regime::P5:
        {
            double const gamma = need(extras.gamma, "gamma", regime);
            double const r = need(extras.r, "r", regime);
            if (!extras.k)
            {
                throw ParameterError("P5 schedule needs k");
            }
            require(gamma > 0.0, "P5: gamma must be positive");
            require(r >= 0.0, "P5: r must be >= 0");
            s.params = {std::pow(L, -gamma), std::pow(L, -(1.0 + gamma))};
            s.centering = static_cast<std::int64_t>(std::floor(r * L));
            s.x0 = s.centering + *extras.k;
            require(s.x0 >= 0, "P5: initial state is negative");
            s.time_scale = std::pow(L, gamma);
            break;
        }
    }
    require(s.params.p > 0.0 && s.params.p < 1.0 && s.params.c > 0.0
                && s.params.c < 1.0,
            "build_schedule: L too small for p(L), c(L) to lie in (0,1)");
    return s;
}

std::vector<std::vector<double>>
rescaled_marginals(ScalingSchedule const& schedule,
                   std::vector<double> const& times,
                   std::int64_t reps,
                   std::uint64_t seed)
{
    require(reps >= 1, "rescaled_marginals: reps must be >= 1");
    struct Probe
    {
        std::int64_t step;
        double frac;
    };
    std::vector<Probe> probes;
    std::vector<std::int64_t> steps;
    for (double t : times)
    {
        require(t >= 0.0 && std::isfinite(t), "rescaled_marginals: bad time");
        double const s = t * schedule.time_scale;
        auto const n = static_cast<std::int64_t>(std::floor(s));
        double frac = s - static_cast<double>(n);
        if (frac < 1e-9)
        {
            frac = 0.0;
        }
        probes.push_back({n, frac});
        steps.push_back(n);
        steps.push_back(n + 1);
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    auto index_of = [&](std::int64_t n) {
        return static_cast<std::size_t>(
            std::lower_bound(steps.begin(), steps.end(), n) - steps.begin());
    };

    std::uint64_t const master = derive_seed(
        seed, label(std::string("rescaled/") + std::string(to_string(schedule.regime)),
                    schedule.L));
    std::vector<std::vector<double>> out(
        times.size(), std::vector<double>(static_cast<std::size_t>(reps)));
    double const centering = static_cast<double>(schedule.centering);
    parallel_for(reps, [&](std::int64_t r) {
        Stream stream(master, static_cast<std::uint64_t>(r));
        auto const values
            = sample_x_at_steps(schedule.params, schedule.x0, steps, stream);
        for (std::size_t i = 0; i < probes.size(); ++i)
        {
            auto const a = static_cast<double>(values[index_of(probes[i].step)]);
            auto const b
                = static_cast<double>(values[index_of(probes[i].step + 1)]);
            double const x = a + probes[i].frac * (b - a);
            out[i][static_cast<std::size_t>(r)]
                = (x - centering) / schedule.space_scale;
        }
    });
    return out;
}

std::vector<double> rescaled_marginal(ScalingSchedule const& schedule,
                                      double t,
                                      std::int64_t reps,
                                      std::uint64_t seed)
{
    return rescaled_marginals(schedule, {t}, reps, seed).front();
}

LimitSpec limit_for(ScalingSchedule const& schedule)
{
    switch (schedule.regime)
    {
        case Regime::P2:
            return {CadlagKind::Pdmp, *schedule.extras.y, *schedule.extras.c};
        case Regime::P4:
            return {CadlagKind::Drifted, *schedule.extras.y, *schedule.extras.r};
        case Regime::P5:
            return {CadlagKind::Walk,
                    static_cast<double>(*schedule.extras.k),
                    *schedule.extras.r};
        case Regime::P1:
            break;
    }
    throw ParameterError("limit_for: P1 has no continuous-time limit");
}

std::vector<std::vector<double>> limit_marginals(LimitSpec const& spec,
                                                 std::vector<double> const& times,
                                                 std::int64_t reps,
                                                 std::uint64_t seed)
{
    require(reps >= 1, "limit_marginals: reps must be >= 1");
    require(!times.empty(), "limit_marginals: no times");
    double const horizon = *std::max_element(times.begin(), times.end());
    require(horizon >= 0.0, "limit_marginals: negative time");
    std::vector<std::vector<double>> out(
        times.size(), std::vector<double>(static_cast<std::size_t>(reps)));
    parallel_for(reps, [&](std::int64_t r) {
        Stream stream(seed, static_cast<std::uint64_t>(r));
        CadlagPath path;
        switch (spec.kind)
        {
            case CadlagKind::Pdmp:
                path = sample_pdmp(spec.initial_value, spec.parameter, horizon, stream);
                break;
            case CadlagKind::Drifted:
                path = sample_drifted(spec.initial_value, spec.parameter, horizon,
                                      stream);
                break;
            case CadlagKind::Walk:
                path = sample_ctrw(std::llround(spec.initial_value), spec.parameter,
                                   horizon, stream);
                break;
        }
        for (std::size_t i = 0; i < times.size(); ++i)
        {
            out[i][static_cast<std::size_t>(r)] = path.value_at(times[i]);
        }
    });
    return out;
}

std::vector<double> limit_marginal(LimitSpec const& spec,
                                   double t,
                                   std::int64_t reps,
                                   std::uint64_t seed)
{
    return limit_marginals(spec, {t}, reps, seed).front();
}

//---------------------------------------------------------------------------//

namespace
{
using ScheduleAt = std::function<ScalingSchedule(double)>;

ComparisonReport compare_with_limit(std::string regime,
                                    ScheduleAt const& schedule_at,
                                    LimitSpec const& limit,
                                    LimitSpec const& perturbed,
                                    std::string const& perturbation,
                                    std::vector<double> L_grid,
                                    std::vector<double> const& t_grid,
                                    std::int64_t reps,
                                    std::uint64_t seed,
                                    ComparisonOptions const& options)
{
    require(!L_grid.empty() && !t_grid.empty(), "compare: empty grid");
    require(reps >= 2, "compare: reps must be >= 2");
    std::sort(L_grid.begin(), L_grid.end());
    ComparisonReport report;
    report.regime = std::move(regime);
    report.L_grid = L_grid;
    report.t_grid = t_grid;
    double const threshold = dkw_threshold(reps, reps, options.level);

    std::vector<std::vector<double>> ks_by_t(t_grid.size());
    for (double L : L_grid)
    {
        auto const schedule = schedule_at(L);
        auto const chain = rescaled_marginals(schedule, t_grid, reps, seed);
        auto const lim = limit_marginals(
            limit, t_grid, reps, derive_seed(seed, label("limit/" + report.regime, L)));
        for (std::size_t i = 0; i < t_grid.size(); ++i)
        {
            KsCell cell;
            cell.L = L;
            cell.t = t_grid[i];
            cell.ks = ks_report(chain[i], lim[i], options.level);
            cell.wasserstein = wasserstein1(chain[i], lim[i]);
            ks_by_t[i].push_back(cell.ks.value);
            report.ks_table.push_back(cell);
        }
    }

    bool ok = true;
    for (auto const& cell : report.ks_table)
    {
        if (cell.L == L_grid.back())
        {
            bool const below = cell.ks.value < options.ks_cap;
            report.checks.push_back(
                {"ks_cap_at_largest_L/t=" + std::to_string(cell.t),
                 make_report("ks_two_sample", cell.ks.value, cell.ks.n1, cell.ks.n2,
                             options.ks_cap, "artifact KS cap at the largest L")});
            ok = ok && below;
        }
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        TrendVerdict v;
        v.t = t_grid[i];
        v.ks_by_L = ks_by_t[i];
        v.tolerance = threshold;
        v.non_increasing = true;
        for (std::size_t j = 1; j < v.ks_by_L.size(); ++j)
        {
            if (v.ks_by_L[j] > v.ks_by_L[j - 1] + v.tolerance)
            {
                v.non_increasing = false;
            }
        }
        ok = ok && v.non_increasing;
        report.trends.push_back(std::move(v));
    }

    if (options.run_calibration)
    {
        double const L = L_grid.back();
        auto const schedule = schedule_at(L);
        CalibrationResult null_cal;
        null_cal.kind = "null";
        null_cal.description = "limit vs independent limit sample";
        null_cal.trials = options.calibration_trials;
        null_cal.required = options.null_passes_required;
        CalibrationResult power;
        power.kind = "power";
        power.description = "chain at largest L vs " + perturbation;
        power.trials = options.calibration_trials;
        power.required = options.power_failures_required;
        std::vector<std::int64_t> null_pass(t_grid.size(), 0);
        std::vector<std::int64_t> power_fail(t_grid.size(), 0);
        for (std::int64_t trial = 0; trial < options.calibration_trials; ++trial)
        {
            std::string const tag = report.regime + "/trial=" + std::to_string(trial);
            auto const a = limit_marginals(limit, t_grid, reps,
                                           derive_seed(seed, "null/a/" + tag));
            auto const b = limit_marginals(limit, t_grid, reps,
                                           derive_seed(seed, "null/b/" + tag));
            auto const chain = rescaled_marginals(schedule, t_grid, reps,
                                                  derive_seed(seed, "power/chain/" + tag));
            auto const wrong = limit_marginals(perturbed, t_grid, reps,
                                               derive_seed(seed, "power/limit/" + tag));
            for (std::size_t i = 0; i < t_grid.size(); ++i)
            {
                null_pass[i] += ks_two_sample(a[i], b[i]) <= threshold ? 1 : 0;
                power_fail[i] += ks_two_sample(chain[i], wrong[i]) > threshold ? 1 : 0;
            }
        }
        null_cal.ok = true;
        power.ok = true;
        for (std::size_t i = 0; i < t_grid.size(); ++i)
        {
            null_cal.counts.emplace_back(t_grid[i], null_pass[i]);
            power.counts.emplace_back(t_grid[i], power_fail[i]);
            null_cal.ok = null_cal.ok && null_pass[i] >= null_cal.required;
            power.ok = power.ok && power_fail[i] >= power.required;
        }
        ok = ok && null_cal.ok && power.ok;
        report.null_calibration = std::move(null_cal);
        report.power = std::move(power);
    }
    report.pass = ok;
    return report;
}
}  // namespace

ComparisonReport compare_prop2(double c,
                               double y,
                               std::vector<double> const& L_grid,
                               std::vector<double> const& t_grid,
                               std::int64_t reps,
                               std::uint64_t seed,
                               ComparisonOptions const& options)
{
    ScalingExtras extras;
    extras.c = c;
    extras.y = y;
    auto const schedule_at
        = [&](double L) { return build_schedule(Regime::P2, L, extras); };
    double const c_wrong = std::min(c + 0.1, 0.999);
    auto report = compare_with_limit(
        "P2", schedule_at, {CadlagKind::Pdmp, y, c}, {CadlagKind::Pdmp, y, c_wrong},
        "limit with c = " + std::to_string(c_wrong), L_grid, t_grid, reps, seed,
        options);
    report.params = {{"c", c}, {"y", y}, {"reps", static_cast<double>(reps)}};
    return report;
}

std::vector<NamedCheck> bulk_concentration_checks(double alpha,
                                                  double r,
                                                  std::vector<double> const& L_values,
                                                  std::int64_t reps,
                                                  std::uint64_t seed)
{
    require(alpha > 0.0 && alpha < 1.0, "bulk check: alpha must lie in (0,1)");
    require(reps >= 2, "bulk check: reps must be >= 2");
    std::vector<NamedCheck> checks;
    std::vector<double> variances;
    for (double L : L_values)
    {
        auto const n = static_cast<std::int64_t>(std::floor(r * L));
        double const q = std::pow(L, -(1.0 - alpha));
        double const scale = std::pow(L, alpha);
        std::uint64_t const master = derive_seed(seed, label("bulk", L));
        std::vector<double> sample(static_cast<std::size_t>(reps));
        parallel_for(reps, [&](std::int64_t i) {
            Stream stream(master, static_cast<std::uint64_t>(i));
            sample[static_cast<std::size_t>(i)]
                = static_cast<double>(draw_binomial(stream, n, q)) / scale;
        });
        auto const m = moments(sample);
        checks.push_back({"bulk_mean/L=" + std::to_string(L),
                          make_report("abs_mean_minus_r", std::abs(m.mean - r), reps,
                                      0, 4.0 * m.mean_stderr(),
                                      "4 standard errors; sample variance "
                                          + std::to_string(m.variance))});
        variances.push_back(m.variance);
    }
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < variances.size(); ++i)
    {
        worst_ratio = std::max(worst_ratio, variances[i] / variances[i - 1]);
    }
    checks.push_back({"bulk_variance_decreasing",
                      make_report("max_consecutive_variance_ratio", worst_ratio, reps,
                                  0, 1.0, "variance must shrink as L grows")});
    return checks;
}

ComparisonReport compare_prop4(double alpha,
                               double r,
                               double y,
                               std::vector<double> const& L_grid,
                               std::vector<double> const& t_grid,
                               std::int64_t reps,
                               std::uint64_t seed,
                               ComparisonOptions const& options)
{
    require(r > 0.0, "compare_prop4: r must be positive");
    ScalingExtras extras;
    extras.alpha = alpha;
    extras.r = r;
    extras.y = y;
    auto const schedule_at
        = [&](double L) { return build_schedule(Regime::P4, L, extras); };
    double const r_wrong = r + 0.5;
    auto report = compare_with_limit(
        "P4", schedule_at, {CadlagKind::Drifted, y, r},
        {CadlagKind::Drifted, y, r_wrong}, "limit with r = " + std::to_string(r_wrong),
        L_grid, t_grid, reps, seed, options);
    report.params = {{"alpha", alpha}, {"r", r}, {"y", y},
                     {"reps", static_cast<double>(reps)}};

    double const L = *std::max_element(L_grid.begin(), L_grid.end());
    auto const chain = rescaled_marginals(schedule_at(L), t_grid, reps,
                                          derive_seed(seed, "prop4/drift"));
    bool ok = report.pass;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        auto const m = moments(chain[i]);
        double const expected = y + (1.0 - r) * t_grid[i];
        NamedCheck check{"drift/t=" + std::to_string(t_grid[i]),
                         make_report("abs_mean_minus_drift", std::abs(m.mean - expected),
                                     reps, 0, 4.0 * m.mean_stderr(),
                                     "expected y + (1-r) t = " + std::to_string(expected)
                                         + ", 4 standard errors")};
        ok = ok && check.report.pass;
        report.checks.push_back(std::move(check));
    }
    for (auto& check :
         bulk_concentration_checks(alpha, r, {L / 100.0, L / 10.0, L}, reps, seed))
    {
        ok = ok && check.report.pass;
        report.checks.push_back(std::move(check));
    }
    report.pass = ok;
    return report;
}

//---------------------------------------------------------------------------//

FirstMove first_move(ChainParams const& params,
                     std::int64_t x0,
                     std::int64_t cap,
                     Stream& stream)
{
    FirstMove move;
    if (x0 == 0)
    {
        move.censored = true;
        return move;
    }
    std::int64_t k = x0;
    for (std::int64_t n = 1; n <= cap; ++n)
    {
        std::int64_t const next = step_x(k, params, stream);
        if (next != k)
        {
            move.holding_steps = n;
            move.jump = next - k;
            return move;
        }
    }
    move.holding_steps = cap;
    move.censored = true;
    return move;
}

FirstMove sample_two_clock(double L, double gamma, std::int64_t Q, Stream& stream)
{
    require(L > 1.0 && gamma > 0.0 && Q >= 0, "sample_two_clock: bad parameters");
    double const birth = std::pow(L, -gamma);
    double const c = std::pow(L, -(1.0 + gamma));
    double const any_catastrophe
        = -std::expm1(static_cast<double>(Q) * std::log1p(-c));
    std::int64_t const t1 = draw_geometric(stream, birth);
    FirstMove move;
    if (any_catastrophe <= 0.0)
    {
        move.holding_steps = t1;
        move.jump = 1;
        return move;
    }
    std::int64_t const t2 = draw_geometric(stream, any_catastrophe);
    if (t1 <= t2)
    {
        move.holding_steps = t1;
        move.jump = 1;
        return move;
    }
    // Z given Z >= 1 by inversion.
    double u = stream.uniform01() * any_catastrophe;
    std::int64_t z = 1;
    for (; z < Q; ++z)
    {
        double const mass = std::exp(binomial_log_pmf(Q, z, c));
        if (u < mass)
        {
            break;
        }
        u -= mass;
    }
    move.holding_steps = t2;
    move.jump = -z;
    return move;
}

Prop5Report compare_prop5(double gamma,
                          double r,
                          std::int64_t k,
                          double L,
                          std::int64_t reps,
                          std::uint64_t seed,
                          double level)
{
    require(reps >= 2, "compare_prop5: reps must be >= 2");
    ScalingExtras extras;
    extras.gamma = gamma;
    extras.r = r;
    extras.k = k;
    auto const schedule = build_schedule(Regime::P5, L, extras);

    Prop5Report rep;
    rep.gamma = gamma;
    rep.r = r;
    rep.k = k;
    rep.L = L;
    rep.reps = reps;
    rep.x0 = schedule.x0;
    std::int64_t const cap
        = static_cast<std::int64_t>(std::ceil(100.0 * schedule.time_scale));

    std::uint64_t const chain_seed = derive_seed(seed, label("prop5/chain", L));
    std::vector<FirstMove> moves(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](std::int64_t i) {
        Stream stream(chain_seed, static_cast<std::uint64_t>(i));
        moves[static_cast<std::size_t>(i)]
            = first_move(schedule.params, schedule.x0, cap, stream);
    });

    std::uint64_t const clock_seed = derive_seed(seed, label("prop5/two-clock", L));
    std::vector<FirstMove> clock_moves(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](std::int64_t i) {
        Stream stream(clock_seed, static_cast<std::uint64_t>(i));
        clock_moves[static_cast<std::size_t>(i)]
            = sample_two_clock(L, gamma, schedule.x0, stream);
    });

    std::uint64_t const limit_seed = derive_seed(seed, label("prop5/limit", L));
    std::vector<double> limit_holding(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](std::int64_t i) {
        Stream stream(limit_seed, static_cast<std::uint64_t>(i));
        limit_holding[static_cast<std::size_t>(i)] = draw_exponential(stream, 1.0 + r);
    });

    std::vector<double> holding;
    std::vector<double> clock_holding;
    holding.reserve(moves.size());
    for (auto const& m : moves)
    {
        if (m.censored)
        {
            ++rep.censored;
            continue;
        }
        holding.push_back(static_cast<double>(m.holding_steps) / schedule.time_scale);
        if (m.jump > 0)
        {
            ++rep.right_jumps;
        }
        else
        {
            ++rep.left_jumps;
            if (m.jump <= -2)
            {
                ++rep.big_left_jumps;
            }
        }
    }
    for (auto const& m : clock_moves)
    {
        clock_holding.push_back(static_cast<double>(m.holding_steps)
                                / schedule.time_scale);
    }
    require(!holding.empty(), "compare_prop5: every replicate was censored");

    rep.holding_ks = ks_report(holding, limit_holding, level, kProp5KsSlack);
    rep.two_clock_ks = ks_report(clock_holding, limit_holding, level, kProp5KsSlack);

    std::int64_t const moved = rep.right_jumps + rep.left_jumps;
    rep.right_frequency
        = static_cast<double>(rep.right_jumps) / static_cast<double>(moved);
    std::tie(rep.right_ci_low, rep.right_ci_high)
        = binomial_ci(rep.right_jumps, moved, kProp5CiLevel);
    rep.right_expected = 1.0 / (1.0 + r);
    rep.right_pass = rep.right_ci_low <= rep.right_expected
                     && rep.right_expected <= rep.right_ci_high;

    rep.big_left_bound = 6.0 * r / schedule.time_scale;
    if (rep.left_jumps > 0)
    {
        double const b = std::min(rep.big_left_bound, 1.0);
        rep.big_left_frequency = static_cast<double>(rep.big_left_jumps)
                                 / static_cast<double>(rep.left_jumps);
        rep.big_left_threshold
            = rep.big_left_bound
              + 4.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(rep.left_jumps));
    }
    else
    {
        rep.big_left_threshold = rep.big_left_bound;
    }
    rep.big_left_pass = rep.big_left_frequency <= rep.big_left_threshold;
    rep.pass = rep.censored == 0 && rep.holding_ks.pass && rep.right_pass
               && rep.big_left_pass;
    return rep;
}
}  // namespace catwalk

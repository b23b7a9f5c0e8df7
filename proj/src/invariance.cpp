#include "catwalk/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catwalk/chains.hpp"
#include "catwalk/errors.hpp"
#include "catwalk/parallel.hpp"

namespace catwalk
{
std::vector<LaplaceRow> laplace_table(std::vector<double> const& cs,
                                      std::vector<double> const& thetas,
                                      std::int64_t terms,
                                      double threshold)
{
    std::vector<LaplaceRow> rows;
    for (double c : cs)
    {
        for (double theta : thetas)
        {
            LaplaceRow row;
            row.c = c;
            row.theta = theta;
            row.terms = terms;
            row.phi = invariant_laplace(theta, c, terms);
            row.residual = std::abs((1.0 + theta) * row.phi
                                    - invariant_laplace((1.0 - c) * theta, c, terms));
            row.truncation_bound = invariant_laplace_error_bound(theta, c, terms);
            row.pass = row.residual < threshold;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<double> perpetuity_samples(double c, std::int64_t n, std::uint64_t seed)
{
    require(n >= 1, "perpetuity_samples: n must be >= 1");
    auto const params = PerpetuityParams::from_tolerance(c);
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        Stream stream(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = perpetuity_sample(params, stream);
    });
    return out;
}

std::vector<double> perpetuity_tail_samples(double c, std::int64_t n, std::uint64_t seed)
{
    require(n >= 1, "perpetuity_tail_samples: n must be >= 1");
    auto const params = PerpetuityParams::from_tolerance(c);
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        Stream stream(seed, static_cast<std::uint64_t>(i));
        double factor = 1.0;
        double sum = 0.0;
        for (std::int64_t k = 0; k <= params.truncation_N + 1; ++k)
        {
            double const e = draw_exponential(stream, 1.0);
            if (k > 0)
            {
                sum += factor * e;
            }
            factor *= 1.0 - c;
        }
        out[static_cast<std::size_t>(i)] = sum;
    });
    return out;
}

MomentCheck perpetuity_moment_check(double c, std::int64_t samples, std::uint64_t seed)
{
    require(samples >= 2, "perpetuity_moment_check: need at least two samples");
    auto const draws = perpetuity_samples(c, samples, seed);
    auto const m = moments(draws);
    MomentCheck check;
    check.c = c;
    check.samples = samples;
    check.mean = m.mean;
    check.mean_stderr = m.mean_stderr();
    check.expected_mean = invariant_mean(c);
    check.mean_pass = std::abs(m.mean - check.expected_mean) <= 3.0 * check.mean_stderr;
    check.variance = m.variance;
    check.variance_stderr = m.variance_stderr();
    check.expected_variance = invariant_variance(c);
    check.variance_pass = std::abs(m.variance - check.expected_variance)
                          <= 5.0 * check.variance_stderr;
    return check;
}

namespace
{
// Long-run extrema from zero; burn-in matches the perpetuity truncation.
std::vector<double>
long_run_extrema(double c, Extremum kind, std::int64_t n, std::uint64_t seed)
{
    auto const burn = PerpetuityParams::from_tolerance(c).truncation_N + 1;
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t i) {
        Stream stream(seed, static_cast<std::uint64_t>(i));
        double v = 0.0;
        for (std::int64_t k = 0; k < burn; ++k)
        {
            v = step_extrema(v, kind, c, stream);
        }
        out[static_cast<std::size_t>(i)] = v;
    });
    return out;
}
}  // namespace

InvarianceReport verify_invariance(double c,
                                   std::int64_t reps,
                                   std::uint64_t seed,
                                   InvarianceOptions const& options)
{
    require(c > 0.0 && c < 1.0, "verify_invariance: c must lie in (0,1)");
    require(reps >= 2, "verify_invariance: reps must be >= 2");
    require(options.mc_samples >= 2, "verify_invariance: mc_samples must be >= 2");
    InvarianceReport report;
    report.c = c;
    report.reps = reps;
    bool ok = true;
    auto add = [&](std::string name, DistanceReport r) {
        ok = ok && r.pass;
        report.checks.push_back({std::move(name), std::move(r)});
    };

    report.laplace = laplace_table(options.laplace_cs, options.thetas,
                                   options.laplace_terms, options.laplace_threshold);
    for (auto const& row : report.laplace)
    {
        ok = ok && row.pass;
    }
    report.moments = perpetuity_moment_check(c, options.mc_samples,
                                             derive_seed(seed, "invariance/moments"));
    ok = ok && report.moments.mean_pass && report.moments.variance_pass;

    // Stationarity: start each PDMP path from its own perpetuity draw.
    auto const params = PerpetuityParams::from_tolerance(c);
    double const horizon = *std::max_element(options.times.begin(), options.times.end());
    std::uint64_t const start_seed = derive_seed(seed, "invariance/stationary-paths");
    std::vector<std::vector<double>> at_time(options.times.size(),
                                             std::vector<double>(static_cast<std::size_t>(reps)));
    parallel_for(reps, [&](std::int64_t i) {
        Stream stream(start_seed, static_cast<std::uint64_t>(i));
        double const y0 = perpetuity_sample(params, stream);
        auto const path = sample_pdmp(y0, c, horizon, stream);
        for (std::size_t j = 0; j < options.times.size(); ++j)
        {
            at_time[j][static_cast<std::size_t>(i)] = path.value_at(options.times[j]);
        }
    });
    for (std::size_t j = 0; j < options.times.size(); ++j)
    {
        std::string const t = std::to_string(options.times[j]);
        auto const fresh = perpetuity_samples(
            c, reps, derive_seed(seed, "invariance/fresh/t=" + t));
        add("stationarity/t=" + t, ks_report(at_time[j], fresh, options.level));
    }

    auto const perp = perpetuity_samples(c, reps, derive_seed(seed, "invariance/perpetuity"));
    auto const maxima
        = long_run_extrema(c, Extremum::Max, reps, derive_seed(seed, "invariance/max"));
    add("max_law", ks_report(maxima, perp, options.level));

    auto const tails
        = perpetuity_tail_samples(c, reps, derive_seed(seed, "invariance/tail"));
    auto const minima
        = long_run_extrema(c, Extremum::Min, reps, derive_seed(seed, "invariance/min"));
    add("min_law", ks_report(minima, tails, options.level));

    auto shifted = perpetuity_tail_samples(c, reps, derive_seed(seed, "invariance/m"));
    {
        Stream stream(derive_seed(seed, "invariance/E"), 0);
        for (auto& v : shifted)
        {
            v += draw_exponential(stream, 1.0);
        }
    }
    auto const plain = perpetuity_samples(c, reps, derive_seed(seed, "invariance/M"));
    add("min_plus_exp_equals_max", ks_report(shifted, plain, options.level));

    // Generator and density checks share one large perpetuity sample.
    auto const big
        = perpetuity_samples(c, options.mc_samples, derive_seed(seed, "invariance/big"));
    double const theta = options.generator_theta;
    std::vector<double> generated(big.size());
    std::transform(big.begin(), big.end(), generated.begin(), [&](double x) {
        return generator_apply([theta](double y) { return std::exp(-theta * y); }, x, c,
                               [theta](double y) { return -theta * std::exp(-theta * y); });
    });
    auto const gm = moments(generated);
    add("generator_mean",
        make_report("abs_mean_generator", std::abs(gm.mean), options.mc_samples, 0,
                    4.0 * gm.mean_stderr(),
                    "f(x) = exp(-theta x), theta = " + std::to_string(theta)
                        + ", 4 standard errors"));

    double const hi
        = std::ceil(invariant_mean(c) + 5.0 * std::sqrt(invariant_variance(c)));
    auto const hist = histogram_density(big, 0.0, hi, options.density_bins);
    double const a = 1.0 / (1.0 - c);
    std::vector<double> grid;
    for (std::size_t i = 0; i < hist.density.size(); ++i)
    {
        double const x = hist.center(i);
        if (a * x <= hi)
        {
            grid.push_back(x);
        }
    }
    auto const residual = invariant_density_residual(hist, grid, c);
    auto const envelope = density_residual_envelope(hist, grid, c);
    double max_residual = 0.0;
    double max_envelope = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        max_residual = std::max(max_residual, std::abs(residual[i]));
        max_envelope = std::max(max_envelope, envelope[i]);
    }
    add("density_residual",
        make_report("max_abs_residual", max_residual, options.mc_samples, 0,
                    options.density_envelope_factor * max_envelope,
                    std::to_string(options.density_bins) + "-bin histogram on [0, "
                        + std::to_string(hi) + "]"));

    report.pass = ok;
    return report;
}
}  // namespace catwalk

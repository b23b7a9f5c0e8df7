#include "catwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "catwalk/errors.hpp"

namespace catwalk
{
namespace
{
std::vector<double> sorted_copy(std::span<double const> sample)
{
    std::vector<double> out(sample.begin(), sample.end());
    std::sort(out.begin(), out.end());
    return out;
}

double pmf_total(Pmf const& pmf)
{
    double total = 0.0;
    for (auto const& [k, mass] : pmf)
    {
        require(mass >= 0.0 && std::isfinite(mass),
                "pmf entries must be finite and non-negative");
        total += mass;
    }
    return total;
}
}  // namespace

DistanceReport make_report(std::string name,
                           double value,
                           std::int64_t n1,
                           std::int64_t n2,
                           double threshold,
                           std::string notes)
{
    DistanceReport r;
    r.statistic_name = std::move(name);
    r.value = value;
    r.n1 = n1;
    r.n2 = n2;
    r.threshold = threshold;
    r.pass = value <= threshold;
    r.notes = std::move(notes);
    return r;
}

double ks_two_sample(std::span<double const> a, std::span<double const> b)
{
    require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
    auto const sa = sorted_copy(a);
    auto const sb = sorted_copy(b);
    double const na = static_cast<double>(sa.size());
    double const nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size())
    {
        double const x = std::min(sa[i], sb[j]);
        // Step over every tie at x in both samples before comparing.
        while (i < sa.size() && sa[i] == x)
        {
            ++i;
        }
        while (j < sb.size() && sb[j] == x)
        {
            ++j;
        }
        d = std::max(d, std::abs(i / na - j / nb));
    }
    // Once one sample is exhausted its ECDF is 1; the gap is largest there.
    d = std::max(d, std::abs(i / na - j / nb));
    return d;
}

double dkw_threshold(std::int64_t n1, std::int64_t n2, double level)
{
    require(n1 >= 1 && n2 >= 1, "dkw_threshold: sample sizes must be >= 1");
    require(level > 0.0 && level < 1.0, "dkw_threshold: level outside (0,1)");
    return std::sqrt(std::log(2.0 / level) / 2.0)
           * std::sqrt(1.0 / static_cast<double>(n1)
                       + 1.0 / static_cast<double>(n2));
}

DistanceReport ks_report(std::span<double const> a,
                         std::span<double const> b,
                         double level,
                         double slack)
{
    auto const n1 = static_cast<std::int64_t>(a.size());
    auto const n2 = static_cast<std::int64_t>(b.size());
    std::string notes = "two-sample DKW bound at level " + std::to_string(level);
    if (slack > 0.0)
    {
        notes += " plus slack " + std::to_string(slack);
    }
    return make_report("ks_two_sample",
                       ks_two_sample(a, b),
                       n1,
                       n2,
                       dkw_threshold(n1, n2, level) + slack,
                       std::move(notes));
}

double tv_integer(Pmf const& lhs, Pmf const& rhs)
{
    require(std::abs(pmf_total(lhs) - 1.0) <= 1e-9,
            "tv_integer: first pmf is not normalized");
    require(std::abs(pmf_total(rhs) - 1.0) <= 1e-9,
            "tv_integer: second pmf is not normalized");
    double sum = 0.0;
    auto li = lhs.begin();
    auto ri = rhs.begin();
    while (li != lhs.end() || ri != rhs.end())
    {
        if (ri == rhs.end() || (li != lhs.end() && li->first < ri->first))
        {
            sum += li->second;
            ++li;
        }
        else if (li == lhs.end() || ri->first < li->first)
        {
            sum += ri->second;
            ++ri;
        }
        else
        {
            sum += std::abs(li->second - ri->second);
            ++li;
            ++ri;
        }
    }
    return 0.5 * sum;
}

double binomial_log_pmf(std::int64_t n, std::int64_t k, double q)
{
    if (k < 0 || k > n)
    {
        return -INFINITY;
    }
    if (q == 0.0)
    {
        return k == 0 ? 0.0 : -INFINITY;
    }
    if (q == 1.0)
    {
        return k == n ? 0.0 : -INFINITY;
    }
    auto const dn = static_cast<double>(n);
    auto const dk = static_cast<double>(k);
    return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0)
           - std::lgamma(dn - dk + 1.0) + dk * std::log(q)
           + (dn - dk) * std::log1p(-q);
}

double poisson_log_pmf(double mean, std::int64_t k)
{
    if (k < 0)
    {
        return -INFINITY;
    }
    if (mean == 0.0)
    {
        return k == 0 ? 0.0 : -INFINITY;
    }
    auto const dk = static_cast<double>(k);
    return dk * std::log(mean) - mean - std::lgamma(dk + 1.0);
}

Pmf binomial_pmf(std::int64_t n, double q)
{
    require(n >= 0, "binomial_pmf: negative trial count");
    require(q >= 0.0 && q <= 1.0, "binomial_pmf: probability outside [0,1]");
    Pmf pmf;
    for (std::int64_t k = 0; k <= n; ++k)
    {
        double const mass = std::exp(binomial_log_pmf(n, k, q));
        if (mass > 0.0)
        {
            pmf[k] = mass;
        }
    }
    return pmf;
}

TruncatedPmf poisson_pmf(double mean, double tail_tol)
{
    require(std::isfinite(mean) && mean >= 0.0,
            "poisson_pmf: mean must be finite and non-negative");
    require(tail_tol > 0.0, "poisson_pmf: tail tolerance must be positive");
    TruncatedPmf out;
    for (std::int64_t k = 0;; ++k)
    {
        double const mass = std::exp(poisson_log_pmf(mean, k));
        if (mass > 0.0)
        {
            out.pmf[k] = mass;
        }
        double const ratio = mean / static_cast<double>(k + 1);
        if (ratio < 1.0)
        {
            // Remaining tail <= mass * ratio / (1 - ratio).
            double const tail = mass * ratio / (1.0 - ratio);
            if (tail < tail_tol)
            {
                out.dropped_mass = tail;
                break;
            }
        }
    }
    return out;
}

Pmf exact_distribution(ChainParams const& params,
                       std::int64_t x0,
                       std::int64_t steps,
                       std::int64_t cutoff)
{
    validate(params);
    require(x0 >= 0 && steps >= 0, "exact_distribution: x0, T must be >= 0");
    require(cutoff <= 1000, "exact_distribution: cutoff above 1000");
    require(x0 + steps <= cutoff, "exact_distribution: x0 + T exceeds cutoff");

    auto const size = static_cast<std::size_t>(cutoff + 1);
    std::vector<double> current(size, 0.0);
    std::vector<double> next(size, 0.0);
    current[static_cast<std::size_t>(x0)] = 1.0;

    // thinning[j] = P(Bin(k, c) = j) for the k being processed.
    std::vector<double> thinning;
    auto fill_thinning = [&](std::int64_t k) {
        thinning.assign(static_cast<std::size_t>(k + 1), 0.0);
        if (k <= 100)
        {
            double term = std::pow(1.0 - params.c, static_cast<double>(k));
            double const odds = params.c / (1.0 - params.c);
            for (std::int64_t j = 0; j <= k; ++j)
            {
                thinning[static_cast<std::size_t>(j)] = term;
                term *= odds * static_cast<double>(k - j)
                        / static_cast<double>(j + 1);
            }
        }
        else
        {
            for (std::int64_t j = 0; j <= k; ++j)
            {
                thinning[static_cast<std::size_t>(j)]
                    = std::exp(binomial_log_pmf(k, j, params.c));
            }
        }
    };

    for (std::int64_t n = 0; n < steps; ++n)
    {
        std::fill(next.begin(), next.end(), 0.0);
        next[0] += current[0];
        for (std::int64_t k = 1; k <= x0 + n; ++k)
        {
            double const mass = current[static_cast<std::size_t>(k)];
            if (mass == 0.0)
            {
                continue;
            }
            next[static_cast<std::size_t>(k + 1)] += params.p * mass;
            fill_thinning(k);
            double const drop_mass = (1.0 - params.p) * mass;
            for (std::int64_t j = 0; j <= k; ++j)
            {
                next[static_cast<std::size_t>(k - j)]
                    += drop_mass * thinning[static_cast<std::size_t>(j)];
            }
        }
        std::swap(current, next);
    }

    Pmf pmf;
    for (std::size_t k = 0; k < size; ++k)
    {
        if (current[k] > 0.0)
        {
            pmf[static_cast<std::int64_t>(k)] = current[k];
        }
    }
    return pmf;
}

double wasserstein1(std::span<double const> a, std::span<double const> b)
{
    require(!a.empty() && !b.empty(), "wasserstein1: empty sample");
    auto const sa = sorted_copy(a);
    auto const sb = sorted_copy(b);
    double const na = static_cast<double>(sa.size());
    double const nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double total = 0.0;
    double x = std::min(sa.front(), sb.front());
    while (i < sa.size() || j < sb.size())
    {
        double const next_a = i < sa.size() ? sa[i] : INFINITY;
        double const next_b = j < sb.size() ? sb[j] : INFINITY;
        double const next_x = std::min(next_a, next_b);
        total += std::abs(i / na - j / nb) * (next_x - x);
        x = next_x;
        while (i < sa.size() && sa[i] == x)
        {
            ++i;
        }
        while (j < sb.size() && sb[j] == x)
        {
            ++j;
        }
    }
    return total;
}

double normal_quantile(double prob)
{
    require(prob > 0.0 && prob < 1.0, "normal_quantile: prob outside (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(),
                                 prob);
}

std::pair<double, double> binomial_ci(std::int64_t successes,
                                      std::int64_t trials,
                                      double level)
{
    require(trials >= 1, "binomial_ci: need at least one trial");
    require(successes >= 0 && successes <= trials,
            "binomial_ci: successes outside [0, trials]");
    require(level > 0.0 && level < 1.0, "binomial_ci: level outside (0,1)");
    double const z = normal_quantile(0.5 + level / 2.0);
    double const n = static_cast<double>(trials);
    double const phat = static_cast<double>(successes) / n;
    double const z2n = z * z / n;
    double const center = (phat + z2n / 2.0) / (1.0 + z2n);
    double const half = z / (1.0 + z2n)
                        * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n));
    double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
    double high = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

double Moments::mean_stderr() const
{
    return std::sqrt(variance / static_cast<double>(count));
}

double Moments::variance_stderr() const
{
    double const n = static_cast<double>(count);
    double const s4 = variance * variance;
    return std::sqrt(std::max(0.0, (fourth_central - s4 * (n - 3.0) / (n - 1.0)) / n));
}

Moments moments(std::span<double const> sample)
{
    require(sample.size() >= 2, "moments: need at least two values");
    Moments m;
    m.count = static_cast<std::int64_t>(sample.size());
    double sum = 0.0;
    for (double v : sample)
    {
        sum += v;
    }
    m.mean = sum / static_cast<double>(m.count);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : sample)
    {
        double const d = v - m.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m.variance = m2 / static_cast<double>(m.count - 1);
    m.fourth_central = m4 / static_cast<double>(m.count);
    return m;
}
}  // namespace catwalk

#include "catwalk/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <boost/math/distributions/poisson.hpp>

#include "catwalk/chains.hpp"
#include "catwalk/errors.hpp"
#include "catwalk/parallel.hpp"
#include "catwalk/stats.hpp"

namespace catwalk
{
double tv_bound_bin_poisson(std::int64_t x, double c)
{
    require(x >= 0, "tv_bound_bin_poisson: negative state");
    require(c > 0.0 && c < 1.0, "tv_bound_bin_poisson: c must lie in (0,1)");
    return 0.5 * static_cast<double>(x) * c * c;
}

double tv_bound_le_cam(std::int64_t x, double c)
{
    require(x >= 0, "tv_bound_le_cam: negative state");
    require(c > 0.0 && c < 1.0, "tv_bound_le_cam: c must lie in (0,1)");
    return static_cast<double>(x) * c * c;
}

double tv_bound_poisson_poisson(double lambda, double mu)
{
    require(lambda >= 0.0 && mu >= 0.0,
            "tv_bound_poisson_poisson: means must be non-negative");
    return std::abs(lambda - mu);
}

//---------------------------------------------------------------------------//

MaximalCoupling::MaximalCoupling(Law first, Law second)
    : first_(std::move(first)), second_(std::move(second))
{
    require(!first_.pmf.empty() && !second_.pmf.empty(),
            "MaximalCoupling: empty pmf window");
    auto const hi_of = [](Law const& law) {
        return law.lo + static_cast<std::int64_t>(law.pmf.size()) - 1;
    };
    lo_ = std::min(first_.lo, second_.lo);
    std::int64_t const hi = std::max(hi_of(first_), hi_of(second_));
    auto const width = static_cast<std::size_t>(hi - lo_ + 1);
    overlap_.resize(width);
    residual_first_.resize(width);
    residual_second_.resize(width);
    for (std::size_t i = 0; i < width; ++i)
    {
        std::int64_t const k = lo_ + static_cast<std::int64_t>(i);
        double const a = mass(first_, k);
        double const b = mass(second_, k);
        overlap_[i] = std::min(a, b);
        residual_first_[i] = a - overlap_[i];
        residual_second_[i] = b - overlap_[i];
        overlap_total_ += overlap_[i];
    }
    overlap_total_ = std::min(overlap_total_, 1.0);
    // Mass outside the window belongs entirely to the residuals.
    residual_first_total_ = 1.0 - overlap_total_;
    residual_second_total_ = 1.0 - overlap_total_;
}

double MaximalCoupling::mass(Law const& law, std::int64_t k) const
{
    std::int64_t const i = k - law.lo;
    if (i < 0 || i >= static_cast<std::int64_t>(law.pmf.size()))
    {
        return 0.0;
    }
    return law.pmf[static_cast<std::size_t>(i)];
}

std::int64_t MaximalCoupling::sample_outside_window(Law const& law,
                                                    Stream& stream) const
{
    std::int64_t const hi = this->hi();
    std::int64_t k = law.exact(stream);
    for (int attempt = 0; attempt < 1'000'000 && k >= lo_ && k <= hi; ++attempt)
    {
        k = law.exact(stream);
    }
    return k;
}

std::int64_t MaximalCoupling::sample_residual(Law const& law,
                                              std::vector<double> const& residual,
                                              double residual_total,
                                              Stream& stream) const
{
    double v = stream.uniform01() * residual_total;
    for (std::size_t i = 0; i < residual.size(); ++i)
    {
        if (v < residual[i])
        {
            return lo_ + static_cast<std::int64_t>(i);
        }
        v -= residual[i];
    }
    return sample_outside_window(law, stream);
}

std::pair<std::int64_t, std::int64_t>
MaximalCoupling::sample(Stream& stream) const
{
    double u = stream.uniform01();
    if (u < overlap_total_)
    {
        std::size_t last = 0;
        for (std::size_t i = 0; i < overlap_.size(); ++i)
        {
            if (overlap_[i] > 0.0)
            {
                last = i;
                if (u < overlap_[i])
                {
                    break;
                }
                u -= overlap_[i];
            }
        }
        std::int64_t const k = lo_ + static_cast<std::int64_t>(last);
        return {k, k};
    }
    std::int64_t const a
        = sample_residual(first_, residual_first_, residual_first_total_, stream);
    std::int64_t const b = sample_residual(
        second_, residual_second_, residual_second_total_, stream);
    return {a, b};
}

std::int64_t MaximalCoupling::sample_second_given_first(std::int64_t first,
                                                        Stream& stream) const
{
    double const a = mass(first_, first);
    if (a > 0.0 && first >= lo_ && first <= hi())
    {
        double const keep
            = overlap_[static_cast<std::size_t>(first - lo_)] / a;
        if (stream.uniform01() < keep)
        {
            return first;
        }
    }
    return sample_residual(
        second_, residual_second_, residual_second_total_, stream);
}

//---------------------------------------------------------------------------//

MaximalCoupling::Law binomial_law(std::int64_t n, double q)
{
    require(n >= 0, "binomial_law: negative trial count");
    require(q >= 0.0 && q <= 1.0, "binomial_law: probability outside [0,1]");
    double const mean = static_cast<double>(n) * q;
    double const sd = std::sqrt(mean * (1.0 - q));
    auto const lo = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor(mean - 12.0 * sd - 10.0)));
    auto const hi = std::min<std::int64_t>(
        n, static_cast<std::int64_t>(std::ceil(mean + 12.0 * sd + 30.0)));
    MaximalCoupling::Law law;
    law.lo = lo;
    law.pmf.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t k = lo; k <= hi; ++k)
    {
        law.pmf.push_back(std::exp(binomial_log_pmf(n, k, q)));
    }
    law.exact = [n, q](Stream& s) { return draw_binomial(s, n, q); };
    return law;
}

MaximalCoupling::Law poisson_law(double mean)
{
    require(std::isfinite(mean) && mean >= 0.0,
            "poisson_law: mean must be finite and non-negative");
    double const sd = std::sqrt(mean);
    auto const lo = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor(mean - 12.0 * sd - 10.0)));
    auto const hi
        = static_cast<std::int64_t>(std::ceil(mean + 12.0 * sd + 30.0));
    MaximalCoupling::Law law;
    law.lo = lo;
    law.pmf.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t k = lo; k <= hi; ++k)
    {
        law.pmf.push_back(std::exp(poisson_log_pmf(mean, k)));
    }
    law.exact = [mean](Stream& s) { return draw_poisson(s, mean); };
    return law;
}

std::pair<std::int64_t, std::int64_t>
coupled_catastrophe_bin_poisson(std::int64_t x, double c, Stream& stream)
{
    require(x >= 0, "coupled_catastrophe_bin_poisson: negative state");
    require(c >= 0.0 && c <= 1.0,
            "coupled_catastrophe_bin_poisson: c outside [0,1]");
    if (x == 0)
    {
        return {0, 0};
    }
    MaximalCoupling const coupling(binomial_law(x, c),
                                   poisson_law(static_cast<double>(x) * c));
    return coupling.sample(stream);
}

std::pair<std::int64_t, std::int64_t>
coupled_catastrophe_poisson_poisson(double lambda, double mu, Stream& stream)
{
    require(lambda >= 0.0 && mu >= 0.0,
            "coupled_catastrophe_poisson_poisson: negative mean");
    if (lambda == mu)
    {
        std::int64_t const q = draw_poisson(stream, lambda);
        return {q, q};
    }
    MaximalCoupling const coupling(poisson_law(lambda), poisson_law(mu));
    return coupling.sample(stream);
}

//---------------------------------------------------------------------------//

void step_coupled(CoupledTriple& t,
                  double p,
                  double c,
                  std::int64_t step_index,
                  Stream& stream)
{
    double const lambda = p / (1.0 - p);
    if (draw_bernoulli(stream, p))
    {
        if (t.x > 0)
        {
            ++t.x;
        }
        if (!t.u_escaped)
        {
            ++t.u;
        }
        ++t.y;
    }
    else
    {
        bool const couple_xu = !t.tau_xu && !t.u_escaped && t.x == t.u;
        bool const couple_uy = !t.tau_uy && !t.u_escaped;
        std::int64_t drop_x = 0;
        std::int64_t drop_u = 0;
        std::int64_t drop_y = 0;
        double const u_mean = t.u_escaped ? 0.0 : static_cast<double>(t.u) * c;
        if (couple_xu)
        {
            std::tie(drop_x, drop_u)
                = coupled_catastrophe_bin_poisson(t.x, c, stream);
            if (couple_uy)
            {
                MaximalCoupling const uy(poisson_law(u_mean),
                                         poisson_law(lambda));
                drop_y = uy.sample_second_given_first(drop_u, stream);
            }
            else
            {
                drop_y = draw_poisson(stream, lambda);
            }
        }
        else
        {
            drop_x = t.x > 0 ? draw_binomial(stream, t.x, c) : 0;
            if (couple_uy)
            {
                std::tie(drop_u, drop_y)
                    = coupled_catastrophe_poisson_poisson(u_mean, lambda, stream);
            }
            else
            {
                drop_u = t.u_escaped ? 0 : draw_poisson(stream, u_mean);
                drop_y = draw_poisson(stream, lambda);
            }
        }
        t.x -= drop_x;
        if (!t.u_escaped)
        {
            t.u -= drop_u;
        }
        t.y -= drop_y;
    }
    if (!t.u_escaped && t.u < 0)
    {
        t.u_escaped = true;
    }
    if (!t.tau_xu && (t.u_escaped || t.x != t.u))
    {
        t.tau_xu = step_index;
    }
    if (!t.tau_uy && (t.u_escaped || t.u != t.y))
    {
        t.tau_uy = step_index;
    }
    if (!t.tau_xy && t.x != t.y)
    {
        t.tau_xy = step_index;
    }
}

double prop1_union_bound(double L, double p, std::int64_t T, double M)
{
    require(L > 1.0, "prop1_union_bound: L must exceed 1");
    require(p > 0.0 && p < 1.0, "prop1_union_bound: p must lie in (0,1)");
    require(T >= 0 && M >= 0.0, "prop1_union_bound: T and M must be >= 0");
    if (T == 0)
    {
        return 0.0;
    }
    double const c = 1.0 / L;
    double const n_star = L * p / (1.0 - p);
    double const lambda = c * n_star;
    double const t = static_cast<double>(T);
    double const drops_mean = t * (t + n_star) * c;

    double const step_xu = 0.5 * c * c * 0.5 * (2.0 * n_star + t - drops_mean - M)
                           * (t + drops_mean + M + 1.0);
    double const step_uy = (drops_mean + M + t + 1.0) * (M + t * lambda) * c;

    // P(A^c) = P(Poiss(drops_mean) >= drops_mean + M)
    boost::math::poisson_distribution<double> drops(drops_mean);
    double const threshold = std::ceil(drops_mean + M);
    double const tail
        = threshold <= 0.0 ? 1.0 : boost::math::cdf(complement(drops, threshold - 1.0));
    return t * (std::max(step_xu, 0.0) + step_uy) + tail;
}

Prop1Row run_coupled_prop1(double L,
                           double p,
                           std::int64_t T,
                           std::int64_t reps,
                           std::uint64_t seed,
                           double margin_M)
{
    require(L > 1.0, "run_coupled_prop1: L must exceed 1");
    require(p > 0.0 && p < 1.0, "run_coupled_prop1: p must lie in (0,1)");
    require(T >= 0, "run_coupled_prop1: T must be >= 0");
    require(reps >= 1, "run_coupled_prop1: reps must be >= 1");

    Prop1Row row;
    row.L = L;
    row.p = p;
    row.T = T;
    row.reps = reps;
    row.margin_M = margin_M;
    row.x0 = std::llround(L * p / (1.0 - p));
    double const c = 1.0 / L;
    std::uint64_t const master
        = derive_seed(seed, "prop1/L=" + std::to_string(std::llround(L)));

    std::vector<CoupledTriple> finals(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](std::int64_t r) {
        Stream stream(master, static_cast<std::uint64_t>(r));
        CoupledTriple triple;
        triple.x = triple.u = triple.y = row.x0;
        for (std::int64_t n = 1; n <= T; ++n)
        {
            step_coupled(triple, p, c, n, stream);
        }
        finals[static_cast<std::size_t>(r)] = triple;
    });

    row.final_x.reserve(finals.size());
    for (auto const& t : finals)
    {
        row.discrepancies += t.tau_xy ? 1 : 0;
        row.discrepancies_xu += t.tau_xu ? 1 : 0;
        row.discrepancies_uy += t.tau_uy ? 1 : 0;
        row.u_escaped += t.u_escaped ? 1 : 0;
        row.final_x.push_back(t.x);
    }
    row.p_hat = static_cast<double>(row.discrepancies) / static_cast<double>(reps);
    std::tie(row.ci_low, row.ci_high)
        = binomial_ci(row.discrepancies, reps, kProp1CiLevel);
    row.union_bound = prop1_union_bound(L, p, T, margin_M);
    return row;
}

Prop1Study verify_prop1(double p,
                        std::int64_t T,
                        std::vector<double> L_grid,
                        std::int64_t reps,
                        std::uint64_t seed,
                        double margin_M,
                        double cap)
{
    require(!L_grid.empty(), "verify_prop1: empty L grid");
    std::sort(L_grid.begin(), L_grid.end());
    Prop1Study study;
    study.cap = cap;
    for (double L : L_grid)
    {
        study.rows.push_back(run_coupled_prop1(L, p, T, reps, seed, margin_M));
    }
    study.non_increasing = true;
    for (std::size_t i = 1; i < study.rows.size(); ++i)
    {
        if (study.rows[i].ci_low > study.rows[i - 1].ci_high)
        {
            study.non_increasing = false;
        }
    }
    study.below_cap = study.rows.back().p_hat < cap;
    study.pass = study.non_increasing && study.below_cap;
    return study;
}
}  // namespace catwalk

#include "catwalk/limits.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catwalk/errors.hpp"

namespace catwalk
{
std::string_view to_string(CadlagKind kind)
{
    switch (kind)
    {
        case CadlagKind::Pdmp:
            return "pdmp";
        case CadlagKind::Drifted:
            return "drifted";
        case CadlagKind::Walk:
            return "walk";
    }
    return "?";
}

double CadlagPath::value_at(double t) const
{
    require(t >= 0.0 && t <= horizon, "value_at: time outside [0, horizon]");
    auto const it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    auto const n = static_cast<std::size_t>(it - jump_times.begin());
    double const base = n == 0 ? initial_value : post_jump_values[n - 1];
    if (kind == CadlagKind::Walk)
    {
        return base;
    }
    double const since = n == 0 ? t : t - jump_times[n - 1];
    return base + since;
}

namespace
{
// Shared clock for the slope-one kinds: rate-one exponential epochs.
template<class Jump>
CadlagPath sample_slope_one(CadlagKind kind,
                            double y0,
                            double horizon,
                            Stream& stream,
                            Jump jump)
{
    require(horizon >= 0.0 && std::isfinite(horizon),
            "horizon must be finite and non-negative");
    CadlagPath path;
    path.kind = kind;
    path.initial_value = y0;
    path.horizon = horizon;
    if (horizon == 0.0)
    {
        return path;
    }
    double t = 0.0;
    double value = y0;
    for (;;)
    {
        double const e = draw_exponential(stream, 1.0);
        if (t + e > horizon)
        {
            break;
        }
        t += e;
        double const pre = value + e;
        value = jump(pre);
        path.jump_times.push_back(t);
        path.pre_jump_values.push_back(pre);
        path.post_jump_values.push_back(value);
    }
    return path;
}
}  // namespace

CadlagPath sample_pdmp(double y0, double c, double horizon, Stream& stream)
{
    require(y0 >= 0.0, "sample_pdmp: y0 must be non-negative");
    require(c > 0.0 && c <= 1.0, "sample_pdmp: c must lie in (0,1]");
    double const keep = 1.0 - c;
    return sample_slope_one(CadlagKind::Pdmp, y0, horizon, stream,
                            [keep](double pre) { return keep * pre; });
}

CadlagPath sample_drifted(double y0, double r, double horizon, Stream& stream)
{
    require(r > 0.0 && std::isfinite(r), "sample_drifted: r must be positive");
    return sample_slope_one(CadlagKind::Drifted, y0, horizon, stream,
                            [r](double pre) { return pre - r; });
}

CadlagPath sample_ctrw(std::int64_t k0, double r, double horizon, Stream& stream)
{
    require(r >= 0.0 && std::isfinite(r), "sample_ctrw: r must be >= 0");
    require(horizon >= 0.0 && std::isfinite(horizon),
            "sample_ctrw: horizon must be finite and non-negative");
    CadlagPath path;
    path.kind = CadlagKind::Walk;
    path.initial_value = static_cast<double>(k0);
    path.horizon = horizon;
    double const rate = 1.0 + r;
    double const up = 1.0 / rate;
    double t = 0.0;
    double value = path.initial_value;
    while (horizon > 0.0)
    {
        double const hold = draw_exponential(stream, rate);
        if (t + hold > horizon)
        {
            break;
        }
        t += hold;
        double const pre = value;
        value += draw_bernoulli(stream, up) ? 1.0 : -1.0;
        path.jump_times.push_back(t);
        path.pre_jump_values.push_back(pre);
        path.post_jump_values.push_back(value);
    }
    return path;
}

double post_jump_closed_form(double y0,
                             double c,
                             std::span<double const> exponentials)
{
    auto const n = static_cast<double>(exponentials.size());
    double sum = std::pow(1.0 - c, n) * y0;
    for (std::size_t i = 0; i < exponentials.size(); ++i)
    {
        sum += std::pow(1.0 - c, n - static_cast<double>(i)) * exponentials[i];
    }
    return sum;
}

//---------------------------------------------------------------------------//

PerpetuityParams PerpetuityParams::from_tolerance(double c, double tail_tol)
{
    require(c > 0.0 && c <= 1.0, "perpetuity: c must lie in (0,1]");
    require(tail_tol > 0.0, "perpetuity: tail tolerance must be positive");
    PerpetuityParams params;
    params.c = c;
    params.tail_tol = tail_tol;
    if (c < 1.0)
    {
        double const n = std::ceil(std::log(c * tail_tol) / std::log1p(-c)) - 1.0;
        params.truncation_N = std::max<std::int64_t>(0, static_cast<std::int64_t>(n));
    }
    return params;
}

double PerpetuityParams::tail_mean() const
{
    return std::pow(1.0 - c, static_cast<double>(truncation_N + 1)) / c;
}

void validate(PerpetuityParams const& params)
{
    require(params.c > 0.0 && params.c <= 1.0, "perpetuity: c must lie in (0,1]");
    require(params.truncation_N >= 0, "perpetuity: truncation must be >= 0");
    require(params.tail_mean() <= params.tail_tol,
            "perpetuity: truncated tail mean exceeds tail_tol");
}

double perpetuity_sample(PerpetuityParams const& params, Stream& stream)
{
    validate(params);
    double const keep = 1.0 - params.c;
    double factor = 1.0;
    double sum = 0.0;
    for (std::int64_t n = 0; n <= params.truncation_N; ++n)
    {
        sum += factor * draw_exponential(stream, 1.0);
        factor *= keep;
    }
    return sum;
}

double invariant_laplace(double theta, double c, std::int64_t terms)
{
    require(theta >= 0.0, "invariant_laplace: theta must be >= 0");
    require(c > 0.0 && c <= 1.0, "invariant_laplace: c must lie in (0,1]");
    require(terms >= 1, "invariant_laplace: need at least one factor");
    double product = 1.0;
    double scale = 1.0;
    for (std::int64_t n = 0; n < terms; ++n)
    {
        product /= 1.0 + scale * theta;
        scale *= 1.0 - c;
    }
    return product;
}

double invariant_laplace_error_bound(double theta, double c, std::int64_t terms)
{
    return std::expm1(theta * std::pow(1.0 - c, static_cast<double>(terms)) / c);
}

double invariant_mean(double c)
{
    return 1.0 / c;
}

double invariant_variance(double c)
{
    return 1.0 / (c * (2.0 - c));
}

double generator_fd_step(double x)
{
    return std::max(1e-6, 1e-6 * std::abs(x));
}

double generator_apply(RealFunction const& f,
                       double x,
                       double c,
                       RealFunction const& derivative)
{
    require(static_cast<bool>(f), "generator_apply: empty function");
    require(x >= 0.0, "generator_apply: x must be >= 0");
    require(c > 0.0 && c <= 1.0, "generator_apply: c must lie in (0,1]");
    double slope = 0.0;
    if (derivative)
    {
        slope = derivative(x);
    }
    else
    {
        double const h = generator_fd_step(x);
        slope = (f(x + h) - f(x - h)) / (2.0 * h);
    }
    double const fx = f(x);
    double const fjump = f((1.0 - c) * x);
    double const out = slope + fjump - fx;
    if (!std::isfinite(out))
    {
        throw NumericError("generator_apply: non-finite value at x = "
                           + std::to_string(x));
    }
    return out;
}

//---------------------------------------------------------------------------//

double HistogramDensity::bin_width() const
{
    return (hi - lo) / static_cast<double>(density.size());
}

double HistogramDensity::center(std::size_t i) const
{
    return lo + (static_cast<double>(i) + 0.5) * bin_width();
}

double HistogramDensity::operator()(double x) const
{
    if (x < lo || x > hi)
    {
        return 0.0;
    }
    double const pos = (x - lo) / bin_width() - 0.5;
    if (pos <= 0.0)
    {
        return density.front();
    }
    auto const last = static_cast<double>(density.size() - 1);
    if (pos >= last)
    {
        return density.back();
    }
    auto const i = static_cast<std::size_t>(pos);
    double const w = pos - static_cast<double>(i);
    return (1.0 - w) * density[i] + w * density[i + 1];
}

HistogramDensity histogram_density(std::span<double const> sample,
                                   double lo,
                                   double hi,
                                   std::size_t bins)
{
    require(!sample.empty(), "histogram_density: empty sample");
    require(hi > lo && bins >= 1, "histogram_density: bad binning");
    HistogramDensity h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    h.sample_size = static_cast<std::int64_t>(sample.size());
    double const width = (hi - lo) / static_cast<double>(bins);
    for (double v : sample)
    {
        if (v < lo || v >= hi)
        {
            continue;
        }
        auto i = static_cast<std::size_t>((v - lo) / width);
        h.counts[std::min(i, bins - 1)] += 1;
    }
    h.density.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
    {
        h.density[i] = static_cast<double>(h.counts[i])
                       / (static_cast<double>(h.sample_size) * width);
    }
    return h;
}

namespace
{
void check_grid(std::span<double const> grid, double c, double support_hi)
{
    require(c > 0.0 && c < 1.0, "density residual: c must lie in (0,1)");
    double const a = 1.0 / (1.0 - c);
    for (double x : grid)
    {
        if (!(x > 0.0) || a * x > support_hi)
        {
            throw DomainError("density residual: grid point "
                              + std::to_string(x)
                              + " has [x, ax] outside the estimate support");
        }
    }
}
}  // namespace

std::vector<double> invariant_density_residual(HistogramDensity const& psi,
                                               std::span<double const> grid,
                                               double c)
{
    check_grid(grid, c, psi.hi);
    double const a = 1.0 / (1.0 - c);
    std::vector<double> out;
    out.reserve(grid.size());
    std::vector<double> nodes;
    for (double x : grid)
    {
        double const upper = a * x;
        nodes.assign(1, x);
        for (std::size_t i = 0; i < psi.density.size(); ++i)
        {
            double const m = psi.center(i);
            if (m > x && m < upper)
            {
                nodes.push_back(m);
            }
        }
        nodes.push_back(upper);
        double integral = 0.0;
        for (std::size_t i = 1; i < nodes.size(); ++i)
        {
            integral += 0.5 * (psi(nodes[i - 1]) + psi(nodes[i]))
                        * (nodes[i] - nodes[i - 1]);
        }
        out.push_back(psi(x) - integral);
    }
    return out;
}

std::vector<double> invariant_density_residual(RealFunction const& psi,
                                               double support_hi,
                                               std::span<double const> grid,
                                               double c,
                                               int panels)
{
    require(panels >= 1, "density residual: need at least one panel");
    check_grid(grid, c, support_hi);
    double const a = 1.0 / (1.0 - c);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid)
    {
        double const h = (a - 1.0) * x / panels;
        double integral = 0.5 * (psi(x) + psi(a * x));
        for (int i = 1; i < panels; ++i)
        {
            integral += psi(x + i * h);
        }
        out.push_back(psi(x) - integral * h);
    }
    return out;
}

std::vector<double> density_residual_envelope(HistogramDensity const& psi,
                                              std::span<double const> grid,
                                              double c)
{
    check_grid(grid, c, psi.hi);
    double const a = 1.0 / (1.0 - c);
    double const n = static_cast<double>(psi.sample_size);
    double const width = psi.bin_width();
    auto const bins = psi.density.size();
    auto bin_prob = [&](std::size_t i) {
        return static_cast<double>(psi.counts[i]) / n;
    };

    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid)
    {
        // Interpolation weights of the density estimate at x.
        double const pos = (x - psi.lo) / width - 0.5;
        std::size_t i0 = 0;
        double w1 = 0.0;
        if (pos >= static_cast<double>(bins - 1))
        {
            i0 = bins - 1;
        }
        else if (pos > 0.0)
        {
            i0 = static_cast<std::size_t>(pos);
            w1 = pos - static_cast<double>(i0);
        }
        double const w0 = 1.0 - w1;
        double const p0 = bin_prob(i0);
        double const p1 = i0 + 1 < bins ? bin_prob(i0 + 1) : 0.0;
        double const var_density = (w0 * w0 * p0 * (1.0 - p0)
                                    + w1 * w1 * p1 * (1.0 - p1)
                                    - 2.0 * w0 * w1 * p0 * p1)
                                   / (n * width * width);

        // Empirical mass of (x, ax] under the histogram.
        double mass = 0.0;
        for (std::size_t i = 0; i < bins; ++i)
        {
            double const left = psi.lo + static_cast<double>(i) * width;
            double const right = left + width;
            double const overlap
                = std::max(0.0, std::min(right, a * x) - std::max(left, x));
            mass += bin_prob(i) * overlap / width;
        }
        double const var_mass = mass * (1.0 - mass) / n;
        out.push_back(std::sqrt(std::max(0.0, var_density) + var_mass));
    }
    return out;
}
}  // namespace catwalk

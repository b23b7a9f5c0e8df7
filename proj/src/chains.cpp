#include "catwalk/chains.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catwalk/errors.hpp"

namespace catwalk
{
void validate(ChainParams const& params, bool allow_unit_c)
{
    require(params.p > 0.0 && params.p < 1.0, "p must lie in (0,1)");
    if (allow_unit_c)
    {
        require(params.c > 0.0 && params.c <= 1.0, "c must lie in (0,1]");
    }
    else
    {
        require(params.c > 0.0 && params.c < 1.0, "c must lie in (0,1)");
    }
}

std::string_view to_string(ChainKind kind)
{
    switch (kind)
    {
        case ChainKind::X:
            return "X";
        case ChainKind::Y:
            return "Y";
        case ChainKind::U:
            return "U";
        case ChainKind::MaxExtrema:
            return "Mextrema";
        case ChainKind::MinExtrema:
            return "mextrema";
    }
    return "?";
}

double metastable_level(ChainParams const& params)
{
    validate(params, true);
    return params.p / ((1.0 - params.p) * params.c);
}

std::int64_t step_x(std::int64_t k, ChainParams const& params, Stream& stream)
{
    if (k < 0)
    {
        throw DomainError("step_x: negative state " + std::to_string(k));
    }
    if (k == 0)
    {
        return 0;
    }
    if (draw_bernoulli(stream, params.p))
    {
        return k + 1;
    }
    return k - draw_binomial(stream, k, params.c);
}

std::int64_t step_y(std::int64_t k, ChainParams const& params, Stream& stream)
{
    if (draw_bernoulli(stream, params.p))
    {
        return k + 1;
    }
    return k - draw_poisson(stream, params.p / (1.0 - params.p));
}

std::int64_t step_u(std::int64_t k, ChainParams const& params, Stream& stream)
{
    if (k < 0)
    {
        throw DomainError("step_u: negative state " + std::to_string(k));
    }
    if (draw_bernoulli(stream, params.p))
    {
        return k + 1;
    }
    return k - draw_poisson(stream, static_cast<double>(k) * params.c);
}

double step_extrema(double value, Extremum kind, double c, Stream& stream)
{
    require(value >= 0.0, "step_extrema: value must be non-negative");
    require(c > 0.0 && c <= 1.0, "step_extrema: c must lie in (0,1]");
    double const e = draw_exponential(stream, 1.0);
    if (kind == Extremum::Max)
    {
        return (1.0 - c) * value + e;
    }
    return (1.0 - c) * (value + e);
}

bool simulate_visit(ChainKind kind,
                    ChainParams const& params,
                    std::int64_t x0,
                    std::int64_t steps,
                    Stream& stream,
                    std::function<void(std::int64_t, std::int64_t)> const& visit)
{
    require(steps >= 0, "simulate: negative step count");
    switch (kind)
    {
        case ChainKind::X:
            validate(params);
            if (x0 < 0)
            {
                throw DomainError("simulate: X requires x0 >= 0");
            }
            break;
        case ChainKind::Y:
            validate(params, true);
            break;
        case ChainKind::U:
            validate(params, true);
            if (x0 < 0)
            {
                throw DomainError("simulate: U requires x0 >= 0");
            }
            break;
        default:
            throw ParameterError(
                "simulate: extrema recursions are real-valued; use "
                "step_extrema");
    }

    std::int64_t k = x0;
    visit(0, k);
    for (std::int64_t n = 1; n <= steps; ++n)
    {
        switch (kind)
        {
            case ChainKind::X:
                k = step_x(k, params, stream);
                break;
            case ChainKind::Y:
                k = step_y(k, params, stream);
                break;
            default:
                if (k < 0)
                {
                    return false;
                }
                k = step_u(k, params, stream);
                break;
        }
        visit(n, k);
    }
    return true;
}

DiscretePath simulate(ChainKind kind,
                      ChainParams const& params,
                      std::int64_t x0,
                      std::int64_t steps,
                      SeedSpec seed)
{
    require(steps <= kMaxStoredSteps,
            "simulate: more than 1e7 steps; use simulate_visit or "
            "summarize_x");
    DiscretePath path;
    path.params = params;
    path.seed = seed;
    path.kind = kind;
    path.values.reserve(static_cast<std::size_t>(steps) + 1);
    Stream stream(seed);
    bool const ok = simulate_visit(
        kind, params, x0, steps, stream, [&](std::int64_t, std::int64_t v) {
            path.values.push_back(v);
        });
    path.escaped = !ok;
    return path;
}

PathSummary summarize_x(ChainParams const& params,
                        std::int64_t x0,
                        std::int64_t steps,
                        SeedSpec seed,
                        std::int64_t window_begin,
                        std::int64_t band_low,
                        std::int64_t band_high)
{
    require(window_begin >= 0 && window_begin <= steps,
            "summarize_x: averaging window outside path");
    PathSummary s;
    s.steps = steps;
    s.window_begin = window_begin;
    s.min_value = s.max_value = x0;
    double sum = 0.0;
    Stream stream(seed);
    simulate_visit(
        ChainKind::X, params, x0, steps, stream,
        [&](std::int64_t n, std::int64_t v) {
            s.min_value = std::min(s.min_value, v);
            s.max_value = std::max(s.max_value, v);
            if (n >= window_begin)
            {
                sum += static_cast<double>(v);
            }
            if (!s.first_band_entry && v >= band_low && v <= band_high)
            {
                s.first_band_entry = n;
            }
            if (!s.absorption_step && v == 0)
            {
                s.absorption_step = n;
            }
            s.final_value = v;
        });
    s.window_mean = sum / static_cast<double>(steps - window_begin + 1);
    return s;
}

std::optional<std::int64_t> absorption_time(ChainParams const& params,
                                            std::int64_t x0,
                                            std::int64_t cap,
                                            SeedSpec seed)
{
    validate(params);
    require(x0 >= 0, "absorption_time: x0 must be non-negative");
    require(cap >= 1, "absorption_time: cap must be positive");
    if (x0 == 0)
    {
        return 0;
    }
    Stream stream(seed);
    std::int64_t k = x0;
    for (std::int64_t n = 1; n <= cap; ++n)
    {
        k = step_x(k, params, stream);
        if (k == 0)
        {
            return n;
        }
    }
    return std::nullopt;
}

std::vector<std::int64_t> sample_x_at_steps(ChainParams const& params,
                                            std::int64_t x0,
                                            std::span<std::int64_t const> steps,
                                            Stream& stream)
{
    validate(params);
    require(x0 >= 0, "sample_x_at_steps: x0 must be non-negative");
    require(std::is_sorted(steps.begin(), steps.end()),
            "sample_x_at_steps: steps must be sorted");
    require(steps.empty() || steps.front() >= 0,
            "sample_x_at_steps: negative step index");

    std::vector<std::int64_t> out;
    out.reserve(steps.size());
    // The chain sits at `state` at step `now`; the next catastrophe happens
    // at step now + run, after run - 1 births.
    std::int64_t now = 0;
    std::int64_t state = x0;
    std::int64_t run = state > 0 ? draw_geometric(stream, 1.0 - params.p) : 0;
    for (std::int64_t target : steps)
    {
        while (state > 0 && now + run <= target)
        {
            std::int64_t const peak = state + (run - 1);
            state = peak - draw_binomial(stream, peak, params.c);
            now += run;
            run = state > 0 ? draw_geometric(stream, 1.0 - params.p) : 0;
        }
        out.push_back(state == 0 ? 0 : state + (target - now));
    }
    return out;
}
}  // namespace catwalk

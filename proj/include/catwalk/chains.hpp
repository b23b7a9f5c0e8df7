#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "catwalk/rng.hpp"

namespace catwalk
{
//! Birth probability p and catastrophe thinning parameter c.
struct ChainParams
{
    double p = 0.5;
    double c = 0.5;
};

//! Requires 0 < p < 1 and 0 < c < 1 (or c <= 1 when allow_unit_c).
void validate(ChainParams const& params, bool allow_unit_c = false);

enum class ChainKind
{
    X,  //!< binomial catastrophes, absorbed at 0
    Y,  //!< Poisson catastrophes of fixed mean p/(1-p), lives on Z
    U,  //!< Poisson catastrophes of mean k*c
    MaxExtrema,
    MinExtrema,
};

std::string_view to_string(ChainKind kind);

struct DiscretePath
{
    std::vector<std::int64_t> values;
    ChainParams params;
    SeedSpec seed;
    ChainKind kind = ChainKind::X;
    //! Set when a U path reached a negative state; values end at that state.
    bool escaped = false;
};

//! Paths longer than this are only available through simulate_visit.
inline constexpr std::int64_t kMaxStoredSteps = 10'000'000;

//! n* = p / ((1 - p) c)
double metastable_level(ChainParams const& params);

std::int64_t step_x(std::int64_t k, ChainParams const& params, Stream& stream);
std::int64_t step_y(std::int64_t k, ChainParams const& params, Stream& stream);
std::int64_t step_u(std::int64_t k, ChainParams const& params, Stream& stream);

enum class Extremum
{
    Max,  //!< M' = (1-c) M + E
    Min,  //!< m' = (1-c)(m + E)
};

//! One step of the local-extrema recursion of the limit PDMP, 0 < c <= 1.
double step_extrema(double value, Extremum kind, double c, Stream& stream);

/*!
 * Simulate T steps of an integer chain (X, Y or U) from x0.
 *
 * Stream index comes from seed; T > kMaxStoredSteps is rejected.
 */
DiscretePath simulate(ChainKind kind,
                      ChainParams const& params,
                      std::int64_t x0,
                      std::int64_t steps,
                      SeedSpec seed);

/*!
 * Streaming variant: visit(n, value) for n = 0..steps.
 *
 * Consumes the stream exactly as simulate does. Returns false if a U path
 * escaped below zero (visiting stops there).
 */
bool simulate_visit(ChainKind kind,
                    ChainParams const& params,
                    std::int64_t x0,
                    std::int64_t steps,
                    Stream& stream,
                    std::function<void(std::int64_t, std::int64_t)> const& visit);

//! Summary of a long X path, accumulated while streaming.
struct PathSummary
{
    std::int64_t steps = 0;
    std::int64_t min_value = 0;
    std::int64_t max_value = 0;
    std::int64_t final_value = 0;
    //! Mean of X_n over n in [window_begin, steps].
    double window_mean = 0.0;
    std::int64_t window_begin = 0;
    //! First n with X_n inside [band_low, band_high], if any.
    std::optional<std::int64_t> first_band_entry;
    std::optional<std::int64_t> absorption_step;
};

PathSummary summarize_x(ChainParams const& params,
                        std::int64_t x0,
                        std::int64_t steps,
                        SeedSpec seed,
                        std::int64_t window_begin,
                        std::int64_t band_low,
                        std::int64_t band_high);

//! First n with X_n = 0, or nullopt if none by cap.
std::optional<std::int64_t> absorption_time(ChainParams const& params,
                                            std::int64_t x0,
                                            std::int64_t cap,
                                            SeedSpec seed);

/*!
 * Sample X at the given (sorted, non-negative) step indices.
 *
 * Uses the forward/backward mode decomposition: from state k the chain makes
 * G-1 births and then one catastrophe, G ~ Geometric(1-p). The law of the
 * returned vector equals that of simulate(X, ...) at those steps, but the
 * cost is proportional to the number of catastrophes, not of steps.
 */
std::vector<std::int64_t> sample_x_at_steps(ChainParams const& params,
                                            std::int64_t x0,
                                            std::span<std::int64_t const> steps,
                                            Stream& stream);
}  // namespace catwalk

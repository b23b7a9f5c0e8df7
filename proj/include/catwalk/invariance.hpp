#pragma once

#include <cstdint>
#include <vector>

#include "catwalk/limits.hpp"
#include "catwalk/scaling.hpp"
#include "catwalk/stats.hpp"

namespace catwalk
{
//! One row of the Laplace functional-equation table.
struct LaplaceRow
{
    double c = 0.0;
    double theta = 0.0;
    std::int64_t terms = 0;
    double phi = 0.0;
    //! |(1 + theta) phi(theta) - phi((1-c) theta)|
    double residual = 0.0;
    double truncation_bound = 0.0;
    bool pass = false;
};

std::vector<LaplaceRow> laplace_table(std::vector<double> const& cs,
                                      std::vector<double> const& thetas,
                                      std::int64_t terms,
                                      double threshold = 1e-10);

struct MomentCheck
{
    double c = 0.0;
    std::int64_t samples = 0;
    double mean = 0.0;
    double mean_stderr = 0.0;
    double expected_mean = 0.0;
    bool mean_pass = false;
    double variance = 0.0;
    double variance_stderr = 0.0;
    double expected_variance = 0.0;
    bool variance_pass = false;
};

//! Perpetuity moments: mean within 3 SE of 1/c, variance within 5 SE of
//! 1/(c(2-c)).
MomentCheck perpetuity_moment_check(double c, std::int64_t samples, std::uint64_t seed);

//! Draws of the perpetuity, one stream per sample.
std::vector<double> perpetuity_samples(double c, std::int64_t n, std::uint64_t seed);

//! Draws of sum_{n>=1} (1-c)^n E_n, the perpetuity without its leading term.
std::vector<double> perpetuity_tail_samples(double c, std::int64_t n, std::uint64_t seed);

struct InvarianceOptions
{
    double level = 0.01;
    std::vector<double> times{1.0, 5.0};
    std::vector<double> laplace_cs{0.1, 0.5, 0.9};
    std::vector<double> thetas{0.1, 1.0, 10.0};
    std::int64_t laplace_terms = 200;
    double laplace_threshold = 1e-10;
    //! Sample size of the moment, generator and density checks.
    std::int64_t mc_samples = 1'000'000;
    double generator_theta = 1.0;
    std::size_t density_bins = 100;
    double density_envelope_factor = 3.0;
};

struct InvarianceReport
{
    double c = 0.0;
    std::int64_t reps = 0;
    std::vector<LaplaceRow> laplace;
    MomentCheck moments;
    std::vector<NamedCheck> checks;
    bool pass = false;
};

/*!
 * Invariant-law suite for the PDMP with parameter c.
 *
 * KS checks at sample size reps: stationarity from a perpetuity start at each
 * time, long-run maxima against the perpetuity, long-run minima against the
 * perpetuity without its leading term, and m + E against M. Also the Laplace
 * table, the perpetuity moments, E[generator of exp(-theta x)] = 0 within 4
 * SE, and max |density residual| within the envelope factor times the
 * largest one-SE envelope over the grid.
 */
InvarianceReport verify_invariance(double c,
                                   std::int64_t reps,
                                   std::uint64_t seed,
                                   InvarianceOptions const& options = {});
}  // namespace catwalk

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catwalk/chains.hpp"

namespace catwalk
{
/*!
 * Outcome of one empirical comparison.
 *
 * pass is value <= threshold. The threshold rule is recorded in notes.
 */
struct DistanceReport
{
    std::string statistic_name;
    double value = 0.0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    double threshold = 0.0;
    bool pass = false;
    std::string notes;
};

DistanceReport make_report(std::string name,
                           double value,
                           std::int64_t n1,
                           std::int64_t n2,
                           double threshold,
                           std::string notes = {});

//! sup_x |F_A(x) - F_B(x)| over the merged sorted samples.
double ks_two_sample(std::span<double const> a, std::span<double const> b);

//! sqrt(ln(2/level)/2) * sqrt(1/n1 + 1/n2)
double dkw_threshold(std::int64_t n1, std::int64_t n2, double level);

//! KS against the DKW threshold at the given level (plus optional slack).
DistanceReport ks_report(std::span<double const> a,
                         std::span<double const> b,
                         double level,
                         double slack = 0.0);

//! Integer law: state -> probability.
using Pmf = std::map<std::int64_t, double>;

//! Half the L1 distance; both inputs must sum to 1 within 1e-9.
double tv_integer(Pmf const& lhs, Pmf const& rhs);

//! A pmf cut to a finite window, with the mass left outside it.
struct TruncatedPmf
{
    Pmf pmf;
    double dropped_mass = 0.0;
};

//! Full Binomial(n, q) pmf (dense; n up to a few thousand).
Pmf binomial_pmf(std::int64_t n, double q);

//! Poisson(mean) pmf, cut where the upper tail falls below tail_tol.
TruncatedPmf poisson_pmf(double mean, double tail_tol = 1e-15);

//! log C(n, k) + k log q + (n-k) log(1-q), for 0 <= k <= n.
double binomial_log_pmf(std::int64_t n, std::int64_t k, double q);
double poisson_log_pmf(double mean, std::int64_t k);

/*!
 * Exact law of X_T started from x0, by T applications of the kernel.
 *
 * Dense on [0, cutoff]; x0 + T must not exceed cutoff, and cutoff <= 1000.
 * Binomial coefficients switch to lgamma above n = 100.
 */
Pmf exact_distribution(ChainParams const& params,
                       std::int64_t x0,
                       std::int64_t steps,
                       std::int64_t cutoff);

/*!
 * Wasserstein-1 distance between empirical laws.
 *
 * Computed as the integral of |F_A - F_B| over the merged support, which
 * equals the mean absolute difference of order statistics when the sizes
 * match and needs no resampling when they differ.
 */
double wasserstein1(std::span<double const> a, std::span<double const> b);

//! Wilson score interval at two-sided confidence `level`.
std::pair<double, double> binomial_ci(std::int64_t successes,
                                      std::int64_t trials,
                                      double level);

//! Standard normal quantile.
double normal_quantile(double prob);

struct Moments
{
    std::int64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  //!< unbiased
    double fourth_central = 0.0;

    double mean_stderr() const;
    //! Standard error of the sample variance (from the 4th moment).
    double variance_stderr() const;
};

Moments moments(std::span<double const> sample);
}  // namespace catwalk

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
enum class CadlagKind
{
    Pdmp,     //!< slope 1, jumps x -> (1-c) x at rate 1
    Drifted,  //!< slope 1, jumps x -> x - r at rate 1
    Walk,     //!< piecewise constant, +-1 jumps at rate 1 + r
};

std::string_view to_string(CadlagKind kind);

/*!
 * Right-continuous trajectory with finitely many jumps on [0, horizon].
 *
 * Between jumps the PDMP kinds move at slope one; the walk kind is flat.
 */
struct CadlagPath
{
    CadlagKind kind = CadlagKind::Pdmp;
    double initial_value = 0.0;
    double horizon = 0.0;
    std::vector<double> jump_times;
    std::vector<double> pre_jump_values;
    std::vector<double> post_jump_values;

    //! Value at time t in [0, horizon] (right-continuous).
    double value_at(double t) const;
    std::size_t jump_count() const { return jump_times.size(); }
};

/*!
 * Sample the limit PDMP on [0, horizon].
 *
 * Epochs S_n are partial sums of mean-one exponentials E_1, E_2, ... drawn
 * in order from the stream; Y(S_n-) = Y(S_{n-1}) + E_n and
 * Y(S_n) = (1-c) Y(S_n-). The exponential that overshoots the horizon is
 * consumed but not recorded.
 */
CadlagPath sample_pdmp(double y0, double c, double horizon, Stream& stream);

//! Same clock as sample_pdmp, but every jump subtracts r. Values may be < 0.
CadlagPath sample_drifted(double y0, double r, double horizon, Stream& stream);

//! Continuous-time simple random walk: rate 1 + r, up with prob 1/(1+r).
CadlagPath sample_ctrw(std::int64_t k0, double r, double horizon, Stream& stream);

//! Closed form W_n = (1-c)^n y0 + sum_i (1-c)^(n-i+1) E_i of the n-th
//! post-jump value, from the exponentials E_1..E_n.
double post_jump_closed_form(double y0,
                             double c,
                             std::span<double const> exponentials);

struct PerpetuityParams
{
    double c = 0.5;
    //! Largest index N in sum_{n=0}^N (1-c)^n E_n.
    std::int64_t truncation_N = 0;
    double tail_tol = 1e-12;

    /*!
     * Choose N = ceil(log(c * tail_tol) / log(1-c)) - 1 so the mean of the
     * discarded tail, (1-c)^(N+1) / c, is at most tail_tol. c = 1 gives N=0.
     */
    static PerpetuityParams from_tolerance(double c, double tail_tol = 1e-12);

    double tail_mean() const;
};

void validate(PerpetuityParams const& params);

//! One draw of sum_{n=0}^N (1-c)^n E_n.
double perpetuity_sample(PerpetuityParams const& params, Stream& stream);

//! prod_{n=0}^{N-1} 1 / (1 + (1-c)^n theta)
double invariant_laplace(double theta, double c, std::int64_t terms);

//! exp(theta (1-c)^N / c) - 1, the relative truncation error bound.
double invariant_laplace_error_bound(double theta, double c, std::int64_t terms);

//! Mean and variance of the invariant law: 1/c and 1/(c(2-c)).
double invariant_mean(double c);
double invariant_variance(double c);

using RealFunction = std::function<double(double)>;

//! Central difference step max(1e-6, 1e-6 |x|).
double generator_fd_step(double x);

/*!
 * f'(x) + f((1-c) x) - f(x).
 *
 * Uses `derivative` when given, otherwise a central difference with step
 * generator_fd_step(x). Throws NumericError on non-finite values.
 */
double generator_apply(RealFunction const& f,
                       double x,
                       double c,
                       RealFunction const& derivative = {});

/*!
 * Fixed-bin histogram density estimate on [lo, hi].
 *
 * Evaluated between bin centres by linear interpolation; constant on the
 * half bins at either end.
 */
struct HistogramDensity
{
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> density;
    std::vector<std::int64_t> counts;
    std::int64_t sample_size = 0;

    double bin_width() const;
    double center(std::size_t i) const;
    double operator()(double x) const;
};

HistogramDensity histogram_density(std::span<double const> sample,
                                   double lo,
                                   double hi,
                                   std::size_t bins);

/*!
 * psi(x) - int_x^{ax} psi(y) dy with a = 1/(1-c), for each grid point.
 *
 * The integral is the trapezoid rule on the nodes {x, bin centres inside
 * (x, ax), ax}, which is exact for the interpolated histogram. Every grid
 * point needs 0 < x and a x <= hi, else DomainError.
 */
std::vector<double> invariant_density_residual(HistogramDensity const& psi,
                                               std::span<double const> grid,
                                               double c);

//! As above for an arbitrary density on [0, support_hi], with a composite
//! trapezoid rule of `panels` panels.
std::vector<double> invariant_density_residual(RealFunction const& psi,
                                               double support_hi,
                                               std::span<double const> grid,
                                               double c,
                                               int panels = 2000);

/*!
 * One-standard-error envelope of the histogram residual at each grid point.
 *
 * Combines the binomial error of the interpolated density with the binomial
 * error of the empirical mass of (x, ax].
 */
std::vector<double> density_residual_envelope(HistogramDensity const& psi,
                                              std::span<double const> grid,
                                              double c);
}  // namespace catwalk

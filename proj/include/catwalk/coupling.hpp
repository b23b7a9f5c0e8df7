#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "catwalk/rng.hpp"

namespace catwalk
{
//! Bound on P(Bin(x,c) != Poiss(xc)) used in the coupling proof: x c^2 / 2.
double tv_bound_bin_poisson(std::int64_t x, double c);

//! Le Cam's bound x c^2 on the same distance.
double tv_bound_le_cam(std::int64_t x, double c);

//! |lambda - mu|, the bound on TV(Poiss(lambda), Poiss(mu)).
double tv_bound_poisson_poisson(double lambda, double mu);

/*!
 * Maximal coupling of two integer laws.
 *
 * Each law is given by its pmf on a window [lo, hi] and an exact sampler for
 * the full law; mass outside the window is handled by rejection from that
 * sampler, so marginals stay exact. With probability 1 - TV both
 * coordinates take a common draw from min(p, q) / (1 - TV); otherwise each
 * is drawn from its residual (p - min) / TV. Disagreement probability is
 * then exactly TV(p, q).
 */
class MaximalCoupling
{
  public:
    using Sampler = std::function<std::int64_t(Stream&)>;

    struct Law
    {
        std::int64_t lo = 0;
        std::vector<double> pmf;  //!< pmf[i] = P(lo + i)
        Sampler exact;
    };

    MaximalCoupling(Law first, Law second);

    std::pair<std::int64_t, std::int64_t> sample(Stream& stream) const;

    //! Draw the second coordinate conditional on the first being `first`.
    std::int64_t sample_second_given_first(std::int64_t first,
                                           Stream& stream) const;

    //! 1 - sum_k min(p_k, q_k), including mass outside the window.
    double disagreement() const { return 1.0 - overlap_total_; }

    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return lo_ + static_cast<std::int64_t>(overlap_.size()) - 1; }

  private:
    double mass(Law const& law, std::int64_t k) const;
    std::int64_t sample_residual(Law const& law,
                                 std::vector<double> const& residual,
                                 double residual_total,
                                 Stream& stream) const;
    std::int64_t sample_outside_window(Law const& law, Stream& stream) const;

    Law first_;
    Law second_;
    std::int64_t lo_ = 0;
    std::vector<double> overlap_;
    std::vector<double> residual_first_;
    std::vector<double> residual_second_;
    double overlap_total_ = 0.0;
    double residual_first_total_ = 0.0;
    double residual_second_total_ = 0.0;
};

//! Window + exact sampler for Binomial(n, q), covering all but ~1e-30 mass.
MaximalCoupling::Law binomial_law(std::int64_t n, double q);
//! Window + exact sampler for Poisson(mean).
MaximalCoupling::Law poisson_law(double mean);

//! (b, q) with b ~ Bin(x, c), q ~ Poiss(xc), P(b != q) = TV.
std::pair<std::int64_t, std::int64_t>
coupled_catastrophe_bin_poisson(std::int64_t x, double c, Stream& stream);

//! (q1, q2) with q1 ~ Poiss(lambda), q2 ~ Poiss(mu), P(q1 != q2) = TV.
std::pair<std::int64_t, std::int64_t>
coupled_catastrophe_poisson_poisson(double lambda, double mu, Stream& stream);

//! Joint state of X(L), U and Y with their first disagreement steps.
struct CoupledTriple
{
    std::int64_t x = 0;
    std::int64_t u = 0;
    std::int64_t y = 0;
    std::optional<std::int64_t> tau_xu;
    std::optional<std::int64_t> tau_uy;
    //! First step with x != y.
    std::optional<std::int64_t> tau_xy;
    //! U reached a negative state (its step is undefined there).
    bool u_escaped = false;
};

/*!
 * Advance the triple one step.
 *
 * One Bernoulli(p) decides birth for all three chains. On a catastrophe the
 * drops are chained through the two maximal couplings while the relevant
 * coordinates still agree; after a coordinate pair has disagreed, its
 * members draw independently.
 */
void step_coupled(CoupledTriple& triple,
                  double p,
                  double c,
                  std::int64_t step_index,
                  Stream& stream);

struct Prop1Row
{
    double L = 0.0;
    double p = 0.0;
    std::int64_t T = 0;
    std::int64_t reps = 0;
    std::int64_t x0 = 0;
    std::int64_t discrepancies = 0;  //!< replicates with X != Y by T
    std::int64_t discrepancies_xu = 0;
    std::int64_t discrepancies_uy = 0;
    std::int64_t u_escaped = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double union_bound = 0.0;
    double margin_M = 0.0;
    std::vector<std::int64_t> final_x;  //!< X_T per replicate
};

/*!
 * Union bound from the two-step coupling argument.
 *
 * T times the per-step bounds on P(X != U, A) and P(U != Y, A), plus
 * P(A^c) with A = {Poiss(T(T+n*)c) < T(T+n*)c + M}. Returned unclamped.
 */
double prop1_union_bound(double L, double p, std::int64_t T, double M);

//! Confidence level of the p_hat interval.
inline constexpr double kProp1CiLevel = 0.95;

Prop1Row run_coupled_prop1(double L,
                           double p,
                           std::int64_t T,
                           std::int64_t reps,
                           std::uint64_t seed,
                           double margin_M = 10.0);

//! Largest allowed p_hat at the largest L.
inline constexpr double kProp1Cap = 0.05;

struct Prop1Study
{
    std::vector<Prop1Row> rows;  //!< sorted by L
    //! No row's interval lies entirely above the previous row's interval.
    bool non_increasing = false;
    bool below_cap = false;
    double cap = kProp1Cap;
    bool pass = false;
};

Prop1Study verify_prop1(double p,
                        std::int64_t T,
                        std::vector<double> L_grid,
                        std::int64_t reps,
                        std::uint64_t seed,
                        double margin_M = 10.0,
                        double cap = kProp1Cap);
}  // namespace catwalk

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catwalk/chains.hpp"
#include "catwalk/limits.hpp"
#include "catwalk/stats.hpp"

namespace catwalk
{
enum class Regime
{
    P1,  //!< p fixed, c = 1/L
    P2,  //!< p = 1 - 1/L, c fixed
    P4,  //!< p = 1 - L^-alpha, c = L^-(1-alpha), centred at floor(rL)
    P5,  //!< p = L^-gamma, c = L^-(1+gamma), centred at floor(rL)
};

std::string_view to_string(Regime regime);

//! Regime-specific inputs; only the ones a regime needs are read.
struct ScalingExtras
{
    std::optional<double> p;
    std::optional<double> c;
    std::optional<double> y;
    std::optional<double> r;
    std::optional<std::int64_t> k;
    std::optional<double> alpha;
    std::optional<double> gamma;
};

struct ScalingSchedule
{
    Regime regime = Regime::P1;
    double L = 0.0;
    ChainParams params;
    std::int64_t x0 = 0;
    double time_scale = 1.0;
    double space_scale = 1.0;
    std::int64_t centering = 0;
    ScalingExtras extras;
};

ScalingSchedule build_schedule(Regime regime, double L, ScalingExtras const& extras);

/*!
 * (X(t sigma_t) - R) / sigma_x for each t, one chain per replicate.
 *
 * X at non-integer times is the linear interpolation of the two adjacent
 * steps. Each replicate draws all requested times from one trajectory.
 * Result is indexed [t][replicate].
 */
std::vector<std::vector<double>>
rescaled_marginals(ScalingSchedule const& schedule,
                   std::vector<double> const& times,
                   std::int64_t reps,
                   std::uint64_t seed);

std::vector<double> rescaled_marginal(ScalingSchedule const& schedule,
                                      double t,
                                      std::int64_t reps,
                                      std::uint64_t seed);

//! Which limit process to sample, and its parameters.
struct LimitSpec
{
    CadlagKind kind = CadlagKind::Pdmp;
    double initial_value = 0.0;
    //! c for the PDMP, r for the drifted process and the walk.
    double parameter = 0.5;
};

//! The limit process matching a resolved schedule (P2, P4 or P5).
LimitSpec limit_for(ScalingSchedule const& schedule);

//! Value at each t, one limit path per replicate; indexed [t][replicate].
std::vector<std::vector<double>> limit_marginals(LimitSpec const& spec,
                                                 std::vector<double> const& times,
                                                 std::int64_t reps,
                                                 std::uint64_t seed);

std::vector<double> limit_marginal(LimitSpec const& spec,
                                   double t,
                                   std::int64_t reps,
                                   std::uint64_t seed);

//---------------------------------------------------------------------------//
// Convergence experiments
//---------------------------------------------------------------------------//

struct ComparisonOptions
{
    double level = 0.01;
    //! KS cap at the largest L.
    double ks_cap = 0.05;
    std::int64_t calibration_trials = 100;
    std::int64_t null_passes_required = 97;
    std::int64_t power_failures_required = 95;
    bool run_calibration = true;
};

struct KsCell
{
    double L = 0.0;
    double t = 0.0;
    DistanceReport ks;
    double wasserstein = 0.0;
};

struct TrendVerdict
{
    double t = 0.0;
    std::vector<double> ks_by_L;
    //! Allowed increase between consecutive L (two-sample DKW threshold).
    double tolerance = 0.0;
    bool non_increasing = false;
};

struct CalibrationResult
{
    std::string kind;  //!< "null" or "power"
    std::string description;
    std::int64_t trials = 0;
    std::int64_t required = 0;
    //! Per t: trials passing (null) or failing (power) the KS test.
    std::vector<std::pair<double, std::int64_t>> counts;
    bool ok = false;
};

//! A named pass/fail sub-check with its numbers.
struct NamedCheck
{
    std::string name;
    DistanceReport report;
};

struct ComparisonReport
{
    std::string regime;
    std::vector<std::pair<std::string, double>> params;
    std::vector<double> L_grid;
    std::vector<double> t_grid;
    std::vector<KsCell> ks_table;
    std::vector<TrendVerdict> trends;
    std::optional<CalibrationResult> null_calibration;
    std::optional<CalibrationResult> power;
    std::vector<NamedCheck> checks;
    bool pass = false;
};

/*!
 * Prop 2: KS between the rescaled chain and the PDMP at each (L, t).
 *
 * Passes when every KS at the largest L is below ks_cap, each t has a
 * non-increasing trend in L, the null calibration (limit vs limit) passes
 * and the power control (chain at c vs limit at c + 0.1) fails as it
 * should.
 */
ComparisonReport compare_prop2(double c,
                               double y,
                               std::vector<double> const& L_grid,
                               std::vector<double> const& t_grid,
                               std::int64_t reps,
                               std::uint64_t seed,
                               ComparisonOptions const& options = {});

/*!
 * Prop 4: KS between the centred rescaled chain and the drifted limit.
 *
 * Adds a drift check (sample mean at each t against y + (1-r) t, 4 standard
 * errors) at the largest L, and the bulk concentration check of
 * Bin(floor(rL), L^-(1-alpha)) / L^alpha at L/100, L/10 and L. The power
 * control compares against the limit with r + 0.5.
 */
ComparisonReport compare_prop4(double alpha,
                               double r,
                               double y,
                               std::vector<double> const& L_grid,
                               std::vector<double> const& t_grid,
                               std::int64_t reps,
                               std::uint64_t seed,
                               ComparisonOptions const& options = {});

//! Concentration of the scaled bulk drop: mean within 4 SE of r and
//! sample variance non-increasing over the L values.
std::vector<NamedCheck> bulk_concentration_checks(double alpha,
                                                  double r,
                                                  std::vector<double> const& L_values,
                                                  std::int64_t reps,
                                                  std::uint64_t seed);

//! First move of the chain from a fixed start.
struct FirstMove
{
    std::int64_t holding_steps = 0;
    std::int64_t jump = 0;  //!< 0 when censored
    bool censored = false;
};

FirstMove first_move(ChainParams const& params,
                     std::int64_t x0,
                     std::int64_t cap,
                     Stream& stream);

/*!
 * The two-clock picture of one move: a Bernoulli(L^-gamma) birth clock
 * against a Bin(Q, L^-(1+gamma)) catastrophe clock. Diagnostic only.
 */
FirstMove sample_two_clock(double L, double gamma, std::int64_t Q, Stream& stream);

struct Prop5Report
{
    double gamma = 0.0;
    double r = 0.0;
    std::int64_t k = 0;
    double L = 0.0;
    std::int64_t reps = 0;
    std::int64_t x0 = 0;
    std::int64_t censored = 0;
    DistanceReport holding_ks;
    std::int64_t right_jumps = 0;
    std::int64_t left_jumps = 0;
    std::int64_t big_left_jumps = 0;
    double right_frequency = 0.0;
    double right_ci_low = 0.0;
    double right_ci_high = 0.0;
    double right_expected = 0.0;
    bool right_pass = false;
    double big_left_frequency = 0.0;
    double big_left_bound = 0.0;
    double big_left_threshold = 0.0;
    bool big_left_pass = false;
    //! Two-clock diagnostic: its holding times against the same Exp law.
    DistanceReport two_clock_ks;
    bool pass = false;
};

//! CI level for the right-jump frequency.
inline constexpr double kProp5CiLevel = 0.99;
//! Extra KS allowance for the holding times.
inline constexpr double kProp5KsSlack = 0.02;

Prop5Report compare_prop5(double gamma,
                          double r,
                          std::int64_t k,
                          double L,
                          std::int64_t reps,
                          std::uint64_t seed,
                          double level = 0.01);
}  // namespace catwalk

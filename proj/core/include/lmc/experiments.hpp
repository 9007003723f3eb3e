#pragma once

#include "lmc/chaos.hpp"
#include "lmc/mc.hpp"
#include "lmc/sde.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lmc {

// Throughout, ode_step = 0 selects the default flow step T/2048.

/// One CSV row per simulated path.
struct PathRow
{
    std::uint64_t seed = 0;
    std::size_t n_jumps = 0;
    double z_T = 0.0;
    double norm_sq = 0.0;
    bool indicator = false;
};

//---------------------------------------------------------------------------//
// Additive equation, finite ν, monotone drift
//---------------------------------------------------------------------------//

struct MonotoneDriftReport
{
    std::size_t n_paths = 0;
    std::size_t n_with_jump = 0;
    std::size_t n_positive = 0;
    double fraction_positive = 0.0;
    double min_norm = 0.0;
    // Every step coefficient on every path is > 0.
    bool coefficients_positive = true;
    std::vector<PathRow> rows;
};

MonotoneDriftReport monotone_drift_experiment(AdditiveJumpSDE const& sde, Monotone direction,
                                              std::shared_ptr<LevyTriplet const> triplet, MCConfig const& mc,
                                              double tau = 1e-12, double ode_step = 0.0);

//---------------------------------------------------------------------------//
// Additive equation, infinite ν (truncated), f monotone near x0
//---------------------------------------------------------------------------//

struct LocalMonotoneRow
{
    double t = 0.0;
    double p_hat = 0.0;
    double p_stderr = 0.0;
    double bound = 0.0;
    std::size_t n_complement = 0;
    std::size_t n_complement_with_jump = 0;
    std::size_t n_positive = 0;
};

struct LocalMonotoneReport
{
    double epsilon = 0.0; // truncation level of the simulated measure
    double radius = 0.0;  // f increasing on (x0 − r, x0 + r)
    double lipschitz = 0.0;
    std::vector<LocalMonotoneRow> rows;
};

/// `full` is the untruncated measure (for the Markov bound), `triplet` the
/// simulated truncation. A_t = {e^{MT} Σ_{s ≤ t}|h(ΔX_s)| > r/2}.
LocalMonotoneReport local_monotone_experiment(AdditiveJumpSDE const& sde, LevyMeasure const& full,
                                              std::shared_ptr<LevyTriplet const> triplet, double radius,
                                              double lipschitz, std::vector<double> const& t_grid,
                                              MCConfig const& mc, double tau = 1e-12, double ode_step = 0.0);

/// (8 e^{2MT} / r²) t (∫h² dν + T(∫|h| dν)²).
double markov_bound(LevyMeasure const& nu, RealFn const& h, double radius, double lipschitz, double horizon,
                    double t);

//---------------------------------------------------------------------------//
// Multiplicative equation with nonzero Wronskian
//---------------------------------------------------------------------------//

struct WronskianReport
{
    bool condition_holds = false;
    std::size_t n_paths = 0;
    std::size_t n_excluded = 0; // N_T = 0
    std::size_t n_single_term = 0;
    std::size_t n_positive = 0;
    double max_formula_error = 0.0;
    std::vector<PathRow> rows;
};

WronskianReport wronskian_experiment(MultiplicativeJumpSDE const& sde, std::shared_ptr<LevyTriplet const> triplet,
                                     MCConfig const& mc, double tau = 1e-12, double ode_step = 0.0);

//---------------------------------------------------------------------------//
// Empirical law of Z_T
//---------------------------------------------------------------------------//

enum class Conditioning { all, no_jumps, at_least_one_jump, s_before_T };

struct Histogram
{
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
};

struct DensityReport
{
    std::size_t n_paths = 0;
    std::size_t n_conditioned = 0;
    // Largest exact-tie multiplicity divided by the conditioned sample size.
    double atom_statistic = 0.0;
    Histogram histogram;
    std::vector<double> kde_x;
    std::vector<double> kde_y;
    double kde_bandwidth = 0.0;
    bool empty = true;
};

DensityReport density_from_samples(std::vector<double> samples, std::size_t n_paths, std::size_t bins = 40);

enum class SdeKind { additive, multiplicative, diffusion };

struct AnySDE
{
    SdeKind kind = SdeKind::additive;
    AdditiveJumpSDE additive;
    MultiplicativeJumpSDE multiplicative;
    DiffusionSDE diffusion;
};

DensityReport density_experiment(AnySDE const& sde, std::shared_ptr<LevyTriplet const> triplet, MCConfig const& mc,
                                 Conditioning conditioning, std::size_t bins = 40,
                                 double ode_step = 0.0);

//---------------------------------------------------------------------------//
// Truncation convergence
//---------------------------------------------------------------------------//

struct TruncationRow
{
    double level = 0.0; // m, with Θ_m = {1/m < |x| < m}
    double mean_sq = 0.0;
    double std_error = 0.0;
    // Paired difference to the next level and its standard error.
    double drop = 0.0;
    double drop_stderr = 0.0;
};

struct TruncationReport
{
    double reference_epsilon = 0.0;
    std::vector<TruncationRow> rows;
    // Strictly decreasing, every drop above 3 standard errors.
    bool separated_decrease = false;
};

/// Paths simulated at the finest truncation `reference_epsilon`; each level
/// restricts the same jumps to Θ_m, so levels are coupled.
TruncationReport truncation_convergence_report(AdditiveJumpSDE const& sde, LevyTriplet const& infinite,
                                               std::vector<double> const& levels, double reference_epsilon,
                                               MCConfig const& mc, double ode_step = 0.0);

//---------------------------------------------------------------------------//
// L^p bound for multiple integrals
//---------------------------------------------------------------------------//

struct MomentBoundReport
{
    std::size_t n = 0;
    double p = 0.0;
    double lambda = 0.0;
    double lhs = 0.0;
    double lhs_stderr = 0.0;
    double lp_integral = 0.0;
    double constant_published = 0.0;
    double constant_binomial = 0.0;
    double rhs_published = 0.0;
    double rhs_binomial = 0.0;
    bool holds_published = false; // lhs − 3 stderr ≤ rhs
    bool holds_binomial = false;
};

MomentBoundReport moment_bound_check(MCConfig const& mc, std::shared_ptr<LevyTriplet const> triplet,
                                     JumpSet const& theta, SimplexIntegrand const& phi, double p);

} // namespace lmc

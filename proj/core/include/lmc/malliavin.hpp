#pragma once

#include "lmc/chaos.hpp"
#include "lmc/derivative_process.hpp"
#include "lmc/interval_set.hpp"
#include "lmc/levy.hpp"
#include "lmc/mc.hpp"
#include "lmc/random_measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lmc {

/// k ∈ 𝒦: bounded weight with analytic time derivative.
struct WeightK
{
    SpaceTimeFn k;
    SpaceTimeFn dt;
    double sup_bound = 1.0;
    std::string name;

    double operator()(double t, double x) const { return k(t, x); }
};

WeightK constant_weight(double c);

/// Sampled boundedness, finite-difference check of dt, and λ⊗ν integrability.
void validate_weight(WeightK const& k, LevyTriplet const& triplet);

//---------------------------------------------------------------------------//
/*!
 * F = f(M(h₁), …, M(hₙ)) with f and its gradient.
 */
struct SmoothFunctional
{
    std::function<double(std::span<double const>)> f;
    std::function<std::vector<double>(std::span<double const>)> grad;
    std::vector<Kernel> kernels;
    std::string name;
};

/// F = f(M(h)).
SmoothFunctional scalar_functional(RealFn f, RealFn df, Kernel h, std::string name = {});

void validate_functional(SmoothFunctional const& F, LevyTriplet const& triplet);

/// Evaluates F and D F on many paths of one triplet, caching the
/// path-independent compensators.
class FunctionalEvaluator
{
  public:
    FunctionalEvaluator(SmoothFunctional F, LevyTriplet const& triplet);

    std::vector<double> arguments(LevyPath const& path) const;
    double value(LevyPath const& path) const;
    double value_at(std::span<double const> args) const { return F_.f(args); }
    DerivativeProcess derivative(LevyPath const& path, LambdaSet const& lambda, WeightK const& k) const;
    DerivativeProcess derivative(LevyPath const& path, std::span<double const> args,
                                 LambdaSet const& lambda, WeightK const& k) const;

    SmoothFunctional const& functional() const noexcept { return F_; }

  private:
    SmoothFunctional F_;
    std::vector<double> compensators_;
};

/// D_t^{Λ,k} M(h) = 1_Λ(0) σ h(t,0) + Σ_{jumps in Λ} k ∂_s h y (s/T − 1{t≤s}).
DerivativeProcess derivative_M(LevyPath const& path, Kernel const& h, LambdaSet const& lambda,
                               WeightK const& k);

/// Deterministic part A(t) − C(t) of the compensated representation, on the
/// grid t_i = iT/G. Path independent; precompute once per (h, Λ, k, ν, G).
std::vector<double> alt_deterministic_part(Kernel const& h, LambdaSet const& lambda, WeightK const& k,
                                           LevyTriplet const& triplet, std::size_t grid_size);

/// The same process written through Ñ and two ν-integrals (the boundary
/// terms of an integration by parts in s).
DerivativeProcess derivative_M_alt(LevyPath const& path, Kernel const& h, LambdaSet const& lambda,
                                   WeightK const& k,
                                   std::optional<std::vector<double>> deterministic = std::nullopt);

DerivativeProcess derivative_smooth(LevyPath const& path, SmoothFunctional const& F,
                                    LambdaSet const& lambda, WeightK const& k);

/// D J_n^Θ(φ). Requires Θ ⊂ Λ.
DerivativeProcess derivative_Jn(LevyPath const& path, JumpSet const& theta, LambdaSet const& lambda,
                                WeightK const& k, SimplexIntegrand const& phi);

/// D φ(T₁,ΔX₁; …; Tₙ,ΔXₙ) over the first n Θ-jumps; zero when fewer than n.
DerivativeProcess derivative_jump_functional(LevyPath const& path, JumpSet const& theta,
                                             LambdaSet const& lambda, WeightK const& k,
                                             SimplexIntegrand const& phi);

/// φ evaluated at the first n Θ-jumps, 0 when there are fewer.
double jump_functional_value(LevyPath const& path, JumpSet const& theta, SimplexIntegrand const& phi);

/// Kernel h(s,y) = 1_Θ(y)/y, for which M(h) = N_T^Θ − T ν(Θ).
Kernel count_kernel(JumpSet const& theta);

/// Moves every Λ-jump from s to s + eps·k(s,y)(s/T − 1{t≤s}). Empty when the
/// move would reorder jumps or leave (0, T].
std::optional<LevyPath> shift_jump_times(LevyPath const& path, LambdaSet const& lambda,
                                         WeightK const& k, double t, double eps);

struct FiniteDifference
{
    double analytic = 0.0;
    double numeric = 0.0;
    double epsilon = 0.0;
};

/// Central difference of the jump functional along the shift direction
/// against derivative_jump_functional at t. Halves eps while the shift would
/// reorder jumps; throws once eps underflows.
FiniteDifference finite_difference_check(LevyPath const& path, JumpSet const& theta,
                                         LambdaSet const& lambda, WeightK const& k,
                                         SimplexIntegrand const& phi, double t, double eps);

/// Same, for an arbitrary functional of the path.
FiniteDifference finite_difference_path(LevyPath const& path, LambdaSet const& lambda, WeightK const& k,
                                        std::function<double(LevyPath const&)> const& F,
                                        DerivativeProcess const& analytic, double t, double eps);

/// 1_Λ(0)·1{σ>0}∫g dW + Σ_{jumps in Λ} [(g(s) − ḡ)k(s,y) − ∂_s k(s,y) Γ(s)],
/// Γ(s) = ∫₀ᵀ g(t)(s/T − 1{t≤s}) dt. The Brownian integral is the left-point
/// sum on the path grid.
double duality_weight(LevyPath const& path, TestFunction const& g, LambdaSet const& lambda,
                      WeightK const& k);

struct DualityReport
{
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_lhs = 0.0;
    double stderr_rhs = 0.0;
    double stderr_diff = 0.0;
    double z_score = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    // True when the paired difference has zero variance; z is then 0 when
    // lhs == rhs and infinite otherwise.
    bool degenerate = false;
};

/// E[∫D_tF g dt] against E[F·duality_weight], common random numbers.
DualityReport duality_residual(MCConfig const& mc, std::shared_ptr<LevyTriplet const> triplet,
                               SmoothFunctional const& F, TestFunction const& g,
                               LambdaSet const& lambda, WeightK const& k);

/// E[G∫DF g + F∫DG g] against E[FG·duality_weight].
DualityReport product_duality_residual(MCConfig const& mc, std::shared_ptr<LevyTriplet const> triplet,
                                       SmoothFunctional const& F, SmoothFunctional const& G,
                                       TestFunction const& g, LambdaSet const& lambda,
                                       WeightK const& k);

/// Paired samples → report.
DualityReport summarize_pairs(std::span<double const> lhs, std::span<double const> rhs,
                              std::uint64_t seed);

} // namespace lmc

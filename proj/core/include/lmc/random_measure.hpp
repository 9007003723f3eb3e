#pragma once

#include "lmc/levy.hpp"

#include <optional>
#include <string>

namespace lmc {

//---------------------------------------------------------------------------//
/*!
 * Deterministic kernel h(t, x) with its analytic time derivative.
 *
 * The value at x = 0 feeds the Brownian part of M(h); values at x ≠ 0 feed
 * the jump part.
 */
struct Kernel
{
    SpaceTimeFn value;
    SpaceTimeFn dt;
    std::string name;

    double operator()(double t, double x) const { return value(t, x); }
};

/// Kernel that does not depend on time.
Kernel time_independent_kernel(RealFn fn, std::string name = {});

/// Throws std::invalid_argument when dt disagrees with a centered finite
/// difference of value, or when h is not square integrable under μ.
void validate_kernel(Kernel const& h, LevyTriplet const& triplet);

/// ∫ h g dμ with μ = σ² λ⊗δ₀ + λ⊗x²ν.
double mu_inner(Kernel const& h, Kernel const& g, LevyTriplet const& triplet);

/// Σ fn(tᵢ)(W(tᵢ₊₁) − W(tᵢ)), left-point Itô sum on the path grid.
double brownian_integral(LevyPath const& path, RealFn const& fn);

/// ∫₀ᵀ∫ h(t,x) x dt ν(dx): the compensator of the jump part of M(h).
double m_compensator(Kernel const& h, LevyTriplet const& triplet);

/// M(h) = σ∫h(t,0)dW + ∫ h(t,x) x dÑ(t,x). Pass a precomputed compensator to
/// skip the quadrature when the same kernel is used on many paths.
double integrate_M(LevyPath const& path, Kernel const& h,
                   std::optional<double> compensator = std::nullopt);

/// Σ_jumps φ(Tⱼ, ΔXⱼ); no factor x.
double integrate_N(LevyPath const& path, SpaceTimeFn const& phi);
/// ∫₀ᵀ∫ φ(t,x) dt ν(dx).
double tilde_compensator(SpaceTimeFn const& phi, LevyTriplet const& triplet);
double integrate_tildeN(LevyPath const& path, SpaceTimeFn const& phi,
                        std::optional<double> compensator = std::nullopt);

/// f(u, t, x).
using ParamKernelFn = std::function<double(double, double, double)>;

struct FubiniResult
{
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    // Σ_q w_q |M(f(u_q, ·))|, the natural size of either side.
    double scale = 0.0;

    double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// ∫₀ᵀ M(f(u,·)) du against M(∫₀ᵀ f(u,·) du), both sides on the same
/// 20-node Gauss–Legendre rule in u.
FubiniResult fubini_residual(LevyPath const& path, ParamKernelFn const& f);

} // namespace lmc

#pragma once

#include "lmc/levy.hpp"
#include "lmc/random_measure.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace lmc {

using Tuple = std::span<JumpRecord const>;

/// How an integrand treats arguments whose times are not increasing.
enum class OffSimplex {
    reject,              // throw: defined on the ordered simplex only
    symmetric_extension, // sort by time first, then evaluate
    native               // the formula is valid for any order
};

//---------------------------------------------------------------------------//
/*!
 * φ(t₁,x₁; …; tₙ,xₙ) on the simplex t₁ < … < tₙ, with analytic partials in
 * each time slot.
 */
struct SimplexIntegrand
{
    std::size_t arity = 1;
    std::function<double(Tuple)> eval;
    // ∂φ/∂t_slot.
    std::function<double(Tuple, std::size_t)> dt_eval;
    OffSimplex off_simplex = OffSimplex::reject;
    std::string name;
    // Set when φ = Πᵢ ψ(tᵢ, xᵢ); enables exact simplex L^p norms.
    std::optional<Kernel> product_factor;

    double operator()(Tuple pts) const;
    double dt(Tuple pts, std::size_t slot) const;
};

/// Throws when some dt_eval disagrees with a centered finite difference at
/// the given ordered sample points.
void validate_integrand(SimplexIntegrand const& phi, std::span<std::vector<JumpRecord> const> samples);

/// φ(t₁,x₁;…) = Πᵢ ψ(tᵢ, xᵢ). Symmetric, so valid off the simplex.
SimplexIntegrand product_integrand(Kernel psi, std::size_t n);
/// An order-1 integrand from a kernel (no factor x).
SimplexIntegrand first_order(Kernel psi);

struct ChaosOptions
{
    // Reject when n·log₂ C(N, n) exceeds this.
    double work_budget = 80.0;
};

/// J_n^Θ(φ): sum over increasing n-tuples of Θ-jumps.
double multiple_integral(LevyPath const& path, JumpSet const& theta, SimplexIntegrand const& phi,
                         ChaosOptions const& opts = {});

/// Visits every increasing n-tuple of `jumps` in lexicographic order.
void for_each_tuple(std::span<JumpRecord const> jumps, std::size_t n,
                    std::function<void(Tuple)> const& visit);

/// Θ-jumps of the path, time ordered.
std::vector<JumpRecord> theta_jumps(LevyPath const& path, JumpSet const& theta);

/// (φ_n ⊗̃ φ₁)(z₁…z_{n+1}) = Σⱼ φ_n(z without slot j) φ₁(zⱼ).
SimplexIntegrand tensor_tilde(SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1);
/// (φ_n ∗ φ₁)(z₁…zₙ) = φ_n(z) Σⱼ φ₁(zⱼ).
SimplexIntegrand star_contract(SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1);
/// (φ_n ⊗ φ₁)(z₁…z_{n+1}) = φ_n(z₁…zₙ) φ₁(z_{n+1}); needs φ_n valid off the simplex
/// only when later symmetrized.
SimplexIntegrand tensor_product(SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1);
/// Average over all n! slot permutations. φ must not be OffSimplex::reject.
SimplexIntegrand symmetrize(SimplexIntegrand const& phi);

struct ProductIdentity
{
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;

    double relative() const { return residual / (1.0 + std::abs(lhs)); }
};

/// J_n(φ_n) J₁(φ₁) against J_{n+1}(φ_n ⊗̃ φ₁) + J_n(φ_n ∗ φ₁) on one path.
ProductIdentity product_identity_residual(LevyPath const& path, JumpSet const& theta,
                                          SimplexIntegrand const& phi_n,
                                          SimplexIntegrand const& phi_1);

enum class MomentConstant {
    published, // e^{-λ} Σ_{k≥n} λ^{k-n} k^{p-1} / (k-n)!
    binomial   // e^{-λ} Σ_{k≥n} λ^{k-n} C(k,n)^{p-1} / (k-n)!
};

/// C_{p,n} as a function of λ = T ν(Θ); series summed until the remainder
/// bound drops below 1e-15 relative.
double moment_constant(std::size_t n, double p, double lambda, MomentConstant kind);

/// ∫_{S_n(Θ)} |φ|^p d(λ⊗ν)^n. Exact for product integrands; otherwise a
/// seeded Monte Carlo estimate with `samples` draws.
struct SimplexNorm
{
    double value = 0.0;
    double std_error = 0.0;
};
SimplexNorm simplex_lp_integral(LevyTriplet const& triplet, JumpSet const& theta,
                                SimplexIntegrand const& phi, double p, std::size_t samples = 200000,
                                std::uint64_t seed = 7);

} // namespace lmc

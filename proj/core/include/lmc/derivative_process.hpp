#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lmc {

struct StepTerm
{
    double time = 0.0;
    double coef = 0.0;
};

/// g on [0, T] with its primitive G(t) = ∫₀ᵗ g.
struct TestFunction
{
    std::function<double(double)> value;
    std::function<double(double)> primitive;
    std::string name;
};

//---------------------------------------------------------------------------//
/*!
 * t ↦ D_t F on [0, T].
 *
 * The continuous part is stored at the nodes of a uniform grid; on [tᵢ, tᵢ₊₁)
 * it takes the value at tᵢ (matching left-point Itô sums). Each step
 * term (s, c) contributes c·(s/T − 1{t ≤ s}), so inner products of step
 * terms are exact closed forms.
 */
class DerivativeProcess
{
  public:
    explicit DerivativeProcess(double horizon);
    DerivativeProcess(double horizon, std::vector<double> continuous, std::vector<StepTerm> steps);

    double horizon() const noexcept { return horizon_; }
    bool has_continuous() const noexcept { return !continuous_.empty(); }
    /// Values at t_i = iT/G, i = 0..G; empty when there is no continuous part.
    std::span<double const> continuous() const noexcept { return continuous_; }
    /// Sorted by time; equal times merged by summation.
    std::span<StepTerm const> steps() const noexcept { return steps_; }
    bool empty() const noexcept;

    double continuous_at(double t) const;
    double step_at(double t) const;
    double at(double t) const { return continuous_at(t) + step_at(t); }

    DerivativeProcess& operator+=(DerivativeProcess const& other);
    DerivativeProcess& operator*=(double a);
    friend DerivativeProcess operator+(DerivativeProcess a, DerivativeProcess const& b) { return a += b; }
    friend DerivativeProcess operator*(double a, DerivativeProcess d) { return d *= a; }

    void add_step(double time, double coef);

    /// Σ|cᵢ| over the step part.
    double step_l1() const;

  private:
    void normalize();

    double horizon_;
    std::vector<double> continuous_;
    std::vector<StepTerm> steps_;
};

/// ∫₀ᵀ (s/T − 1{t≤s})(r/T − 1{t≤r}) dt = min(s,r)(1 − max(s,r)/T).
double step_inner(double s, double r, double horizon);

/// ∫₀ᵀ D_t² dt: closed forms for the step part, left-point sums elsewhere.
double l2_norm_sq(DerivativeProcess const& d);
/// ∫₀ᵀ D_t dt (the step part integrates to zero exactly).
double time_integral(DerivativeProcess const& d);
/// ∫₀ᵀ D_t g(t) dt; the step part uses the primitive of g.
double inner_with(DerivativeProcess const& d, TestFunction const& g);

struct OrthogonalityResult
{
    double residual = 0.0;
    double scale = 0.0;
    // False when the process has a continuous part (0 ∈ Λ), where
    // orthogonality to constants is not expected.
    bool applicable = true;
};
OrthogonalityResult orthogonality_residual(DerivativeProcess const& d);

struct CriterionScale
{
    double l2 = 0.0;
    double scale_sq = 0.0;
    bool positive = false;
};

/// ∫D² > τ·scale², scale² = T(Σ|cᵢ|)² + ∫(continuous part)².
CriterionScale abs_continuity_indicator(DerivativeProcess const& d, double tau = 1e-12);

} // namespace lmc

#pragma once

#include "lmc/derivative_process.hpp"
#include "lmc/levy.hpp"
#include "lmc/malliavin.hpp"

#include <string>
#include <vector>

namespace lmc {

//---------------------------------------------------------------------------//
// Drift flow Φ_t(s, x) = x + ∫ₛᵗ f(Φ_u) du
//---------------------------------------------------------------------------//

struct FlowStep
{
    double value = 0.0;
    // ∫ₛᵗ f′(Φ_u) du, so ∂ₓΦ = exp(log_dx).
    double log_dx = 0.0;
};

class Flow
{
  public:
    /// RK4 on the augmented system (Φ, ∫f′(Φ)) with step at most max_step.
    Flow(RealFn f, RealFn df, double max_step);

    FlowStep advance(double x, double duration) const;

    double value(double s, double t, double x) const { return advance(x, t - s).value; }
    double d_x(double s, double t, double x) const;
    double d_s(double s, double t, double x) const;
    double d_t(double s, double t, double x) const;

    RealFn const& f() const noexcept { return f_; }
    RealFn const& df() const noexcept { return df_; }
    double max_step() const noexcept { return max_step_; }

  private:
    RealFn f_;
    RealFn df_;
    double max_step_;
};

//---------------------------------------------------------------------------//
// Pure-jump equations: dZ = f(Z)dt + jump_map at each jump
//---------------------------------------------------------------------------//

/// Z_t = x + ∫f(Z)ds + Σ h(ΔX).
struct AdditiveJumpSDE
{
    RealFn f;
    RealFn df;
    RealFn h;
    double x0 = 0.0;
    std::string name;
};

/// Z_t = x + ∫f(Z)ds + Σ h(ΔX) g(Z₋).
struct MultiplicativeJumpSDE
{
    RealFn f;
    RealFn df;
    RealFn d2f;
    RealFn g;
    RealFn dg;
    RealFn h;
    double x0 = 0.0;
    // Declared sup norms used in the Wronskian condition.
    double f2_sup = 0.0;
    double g_sup = 0.0;
    double h_sup = 0.0;
    // Range of x over which the condition is sampled.
    double x_lo = -10.0;
    double x_hi = 10.0;
    std::string name;
};

struct JumpTrajectory
{
    double x0 = 0.0;
    double horizon = 1.0;
    std::vector<JumpRecord> jumps;
    std::vector<double> pre;  // Z_{Tᵢ−}
    std::vector<double> post; // Z_{Tᵢ}
    // segment_log[i] = ∫ f′(Z_u) du over (T_{i−1}, Tᵢ), T₀ = 0; the last
    // entry covers (Tₙ, T].
    std::vector<double> segment_log;
    double terminal = 0.0; // Z_T

    std::size_t n_jumps() const noexcept { return jumps.size(); }
    /// ∫_{Tᵢ}^T f′(Z_u) du.
    double log_growth_after(std::size_t i) const;
    /// Z at time t (right-continuous), by re-running the flow from the last jump.
    double at(double t, Flow const& flow) const;
};

/// Default flow step: T/2048.
Flow make_flow(RealFn f, RealFn df, double horizon);

JumpTrajectory solve_additive_jump(LevyPath const& path, AdditiveJumpSDE const& sde, Flow const& flow);
JumpTrajectory solve_additive_jump(LevyPath const& path, AdditiveJumpSDE const& sde);
JumpTrajectory solve_multiplicative(LevyPath const& path, MultiplicativeJumpSDE const& sde, Flow const& flow);
JumpTrajectory solve_multiplicative(LevyPath const& path, MultiplicativeJumpSDE const& sde);

/// cᵢ = exp(∫_{Tᵢ}^T f′)(f(Z_{Tᵢ−}) − f(Z_{Tᵢ})) k(Tᵢ, ΔXᵢ), one entry per jump.
DerivativeProcess derivative_additive(JumpTrajectory const& traj, AdditiveJumpSDE const& sde,
                                      WeightK const& k);

/// k = clamp(−h, −1, 1) for increasing f, clamp(h, −1, 1) for decreasing f.
enum class Monotone { increasing, decreasing };
WeightK monotone_weight(RealFn h, Monotone direction);

/// Jump-by-jump propagation of D Z through the flow and the jump maps.
DerivativeProcess derivative_multiplicative(JumpTrajectory const& traj, MultiplicativeJumpSDE const& sde,
                                            WeightK const& k);

/// W(g, f) = g′f − f′g.
double wronskian(MultiplicativeJumpSDE const& sde, double x);

/// |h(y) W(g,f)(x)| > ½‖f″‖‖h‖²‖g‖² on a grid of x in [x_lo, x_hi] and
/// representative jump sizes y of ν.
bool wronskian_condition(MultiplicativeJumpSDE const& sde, LevyMeasure const& nu);

/// h_p(s) = (s − p)² 1{s > p}.
WeightK last_jump_weight(double p, double horizon);

/// −(t − s)² 1{s < t} clamp(h, −1, 1).
WeightK local_monotone_weight(RealFn h, double t, double horizon);

//---------------------------------------------------------------------------//
// Diffusion with jumps: dZ = b dt + σ(Z) dW + l(y) y dN
//---------------------------------------------------------------------------//

struct DiffusionSDE
{
    RealFn b;
    RealFn db;
    RealFn sigma;
    RealFn dsigma;
    RealFn l;
    double x0 = 0.0;
    std::string name;
};

struct DiffusionTrajectory
{
    // Z at the grid nodes; jumps inside (tᵢ, tᵢ₊₁] are applied at tᵢ₊₁.
    std::vector<double> values;
    double horizon = 1.0;

    double terminal() const { return values.back(); }
};

/// Euler–Maruyama on the path grid.
DiffusionTrajectory solve_diffusion(LevyPath const& path, DiffusionSDE const& sde);

/// D⁰_t Z_T from the discrete variational equation, backward in time.
DerivativeProcess derivative_diffusion_D0(LevyPath const& path, DiffusionTrajectory const& traj,
                                          DiffusionSDE const& sde);

/// σ(Z_t) exp(∫_t^T σ′(Z)dW + ∫_t^T (b′ − σ′²/2)(Z) ds), left-point sums.
DerivativeProcess derivative_diffusion_D0_closed(LevyPath const& path, DiffusionTrajectory const& traj,
                                                 DiffusionSDE const& sde);

/// First grid time with σ(Z) ≠ 0, or T.
double stopping_time_S(DiffusionTrajectory const& traj, DiffusionSDE const& sde);

} // namespace lmc

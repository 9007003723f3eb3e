#include "lmc/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lmc {

Flow::Flow(RealFn f, RealFn df, double max_step) : f_(std::move(f)), df_(std::move(df)), max_step_(max_step)
{
    if (!f_ || !df_) {
        throw std::invalid_argument("Flow: drift and its derivative must be set");
    }
    if (!(max_step_ > 0.0)) {
        throw std::invalid_argument("Flow: step must be positive");
    }
}

FlowStep Flow::advance(double x, double duration) const
{
    if (duration < 0.0) {
        throw std::invalid_argument("Flow::advance: negative duration");
    }
    FlowStep out{x, 0.0};
    if (duration == 0.0) {
        return out;
    }
    auto const steps = static_cast<std::size_t>(std::ceil(duration / max_step_ - 1e-12));
    double const h = duration / static_cast<double>(std::max<std::size_t>(steps, 1));
    double z = x;
    double L = 0.0;
    for (std::size_t i = 0; i < std::max<std::size_t>(steps, 1); ++i) {
        double const k1 = f_(z);
        double const l1 = df_(z);
        double const z2 = z + 0.5 * h * k1;
        double const k2 = f_(z2);
        double const l2 = df_(z2);
        double const z3 = z + 0.5 * h * k2;
        double const k3 = f_(z3);
        double const l3 = df_(z3);
        double const z4 = z + h * k3;
        double const k4 = f_(z4);
        double const l4 = df_(z4);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        L += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
    out.value = z;
    out.log_dx = L;
    return out;
}

double Flow::d_x(double s, double t, double x) const
{
    return std::exp(advance(x, t - s).log_dx);
}

double Flow::d_s(double s, double t, double x) const
{
    return -f_(x) * std::exp(advance(x, t - s).log_dx);
}

double Flow::d_t(double s, double t, double x) const
{
    return f_(advance(x, t - s).value);
}

Flow make_flow(RealFn f, RealFn df, double horizon)
{
    return Flow(std::move(f), std::move(df), horizon / 2048.0);
}

double JumpTrajectory::log_growth_after(std::size_t i) const
{
    double acc = 0.0;
    for (std::size_t j = i + 1; j < segment_log.size(); ++j) {
        acc += segment_log[j];
    }
    return acc;
}

double JumpTrajectory::at(double t, Flow const& flow) const
{
    if (!(t >= 0.0 && t <= horizon)) {
        throw std::out_of_range("JumpTrajectory::at: t outside [0, T]");
    }
    double from = 0.0;
    double z = x0;
    for (std::size_t i = 0; i < jumps.size() && jumps[i].time <= t; ++i) {
        from = jumps[i].time;
        z = post[i];
    }
    return flow.advance(z, t - from).value;
}

namespace {

template<class JumpMap>
JumpTrajectory solve_jump_equation(LevyPath const& path, double x0, Flow const& flow, JumpMap jump)
{
    JumpTrajectory traj;
    traj.x0 = x0;
    traj.horizon = path.horizon();
    traj.jumps.assign(path.jumps().begin(), path.jumps().end());
    double z = x0;
    double last = 0.0;
    for (auto const& j : traj.jumps) {
        auto const step = flow.advance(z, j.time - last);
        traj.pre.push_back(step.value);
        traj.segment_log.push_back(step.log_dx);
        z = step.value + jump(step.value, j.size);
        traj.post.push_back(z);
        last = j.time;
    }
    auto const step = flow.advance(z, traj.horizon - last);
    traj.segment_log.push_back(step.log_dx);
    traj.terminal = step.value;
    return traj;
}

} // namespace

JumpTrajectory solve_additive_jump(LevyPath const& path, AdditiveJumpSDE const& sde, Flow const& flow)
{
    return solve_jump_equation(path, sde.x0, flow, [&](double, double y) { return sde.h(y); });
}

JumpTrajectory solve_additive_jump(LevyPath const& path, AdditiveJumpSDE const& sde)
{
    return solve_additive_jump(path, sde, make_flow(sde.f, sde.df, path.horizon()));
}

JumpTrajectory solve_multiplicative(LevyPath const& path, MultiplicativeJumpSDE const& sde, Flow const& flow)
{
    return solve_jump_equation(path, sde.x0, flow, [&](double z, double y) { return sde.h(y) * sde.g(z); });
}

JumpTrajectory solve_multiplicative(LevyPath const& path, MultiplicativeJumpSDE const& sde)
{
    return solve_multiplicative(path, sde, make_flow(sde.f, sde.df, path.horizon()));
}

DerivativeProcess derivative_additive(JumpTrajectory const& traj, AdditiveJumpSDE const& sde, WeightK const& k)
{
    std::vector<StepTerm> steps;
    steps.reserve(traj.n_jumps());
    for (std::size_t i = 0; i < traj.n_jumps(); ++i) {
        auto const& j = traj.jumps[i];
        double const c = std::exp(traj.log_growth_after(i)) * (sde.f(traj.pre[i]) - sde.f(traj.post[i]))
                         * k.k(j.time, j.size);
        steps.push_back({j.time, c});
    }
    return DerivativeProcess(traj.horizon, {}, std::move(steps));
}

WeightK monotone_weight(RealFn h, Monotone direction)
{
    double const sign = direction == Monotone::increasing ? -1.0 : 1.0;
    return WeightK{[h = std::move(h), sign](double, double y) { return std::clamp(sign * h(y), -1.0, 1.0); },
                   [](double, double) { return 0.0; }, 1.0,
                   direction == Monotone::increasing ? "clamp(-h)" : "clamp(h)"};
}

DerivativeProcess derivative_multiplicative(JumpTrajectory const& traj, MultiplicativeJumpSDE const& sde,
                                            WeightK const& k)
{
    std::size_t const n = traj.n_jumps();
    if (n == 0) {
        return DerivativeProcess(traj.horizon);
    }
    // coef[i] multiplies the basis function (Tᵢ/T − 1{t ≤ Tᵢ}); D Tᵢ = kᵢ·basisᵢ.
    std::vector<double> coef(n, 0.0);
    std::vector<double> kv(n);
    for (std::size_t i = 0; i < n; ++i) {
        kv[i] = k.k(traj.jumps[i].time, traj.jumps[i].size);
    }
    for (std::size_t i = 0; i < n; ++i) {
        // Flow from the previous jump (or 0) to Tᵢ−.
        double const E = std::exp(traj.segment_log[i]);
        for (std::size_t j = 0; j < i; ++j) {
            coef[j] *= E;
        }
        if (i > 0) {
            coef[i - 1] -= sde.f(traj.post[i - 1]) * E * kv[i - 1];
        }
        coef[i] += sde.f(traj.pre[i]) * kv[i];
        // Jump map z ↦ z + h(y) g(z).
        double const a = 1.0 + sde.h(traj.jumps[i].size) * sde.dg(traj.pre[i]);
        for (std::size_t j = 0; j <= i; ++j) {
            coef[j] *= a;
        }
    }
    double const E = std::exp(traj.segment_log[n]);
    for (auto& c : coef) {
        c *= E;
    }
    coef[n - 1] -= E * sde.f(traj.post[n - 1]) * kv[n - 1];

    std::vector<StepTerm> steps;
    for (std::size_t i = 0; i < n; ++i) {
        steps.push_back({traj.jumps[i].time, coef[i]});
    }
    return DerivativeProcess(traj.horizon, {}, std::move(steps));
}

double wronskian(MultiplicativeJumpSDE const& sde, double x)
{
    return sde.dg(x) * sde.f(x) - sde.df(x) * sde.g(x);
}

bool wronskian_condition(MultiplicativeJumpSDE const& sde, LevyMeasure const& nu)
{
    double const rhs = 0.5 * sde.f2_sup * sde.h_sup * sde.h_sup * sde.g_sup * sde.g_sup;
    auto const ys = nu.representative_sizes();
    if (ys.empty()) {
        return false;
    }
    constexpr int points = 2001;
    for (int i = 0; i < points; ++i) {
        double const x = sde.x_lo + (sde.x_hi - sde.x_lo) * i / (points - 1.0);
        double const w = std::abs(wronskian(sde, x));
        for (double y : ys) {
            if (!(std::abs(sde.h(y)) * w > rhs)) {
                return false;
            }
        }
    }
    return true;
}

WeightK last_jump_weight(double p, double horizon)
{
    if (!(p > 0.0 && p < horizon)) {
        throw std::invalid_argument("last_jump_weight: p must lie in (0, T)");
    }
    std::ostringstream name;
    name << "h_p(p=" << p << ")";
    return WeightK{[p](double s, double) { return s > p ? (s - p) * (s - p) : 0.0; },
                   [p](double s, double) { return s > p ? 2.0 * (s - p) : 0.0; },
                   (horizon - p) * (horizon - p), name.str()};
}

WeightK local_monotone_weight(RealFn h, double t, double horizon)
{
    if (!(t > 0.0 && t <= horizon)) {
        throw std::invalid_argument("local_monotone_weight: t must lie in (0, T]");
    }
    std::ostringstream name;
    name << "k^(t=" << t << ")";
    auto const clamp_h = [h](double y) { return std::clamp(h(y), -1.0, 1.0); };
    return WeightK{[clamp_h, t](double s, double y) { return s < t ? -(t - s) * (t - s) * clamp_h(y) : 0.0; },
                   [clamp_h, t](double s, double y) { return s < t ? 2.0 * (t - s) * clamp_h(y) : 0.0; },
                   t * t, name.str()};
}

DiffusionTrajectory solve_diffusion(LevyPath const& path, DiffusionSDE const& sde)
{
    std::size_t const G = path.grid_size();
    double const dt = path.grid_step();
    auto const w = path.brownian();
    auto const jumps = path.jumps();
    DiffusionTrajectory traj;
    traj.horizon = path.horizon();
    traj.values.resize(G + 1);
    traj.values[0] = sde.x0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < G; ++i) {
        double const z = traj.values[i];
        double z1 = z + sde.b(z) * dt + sde.sigma(z) * (w[i + 1] - w[i]);
        double const cell_end = path.grid_time(i + 1);
        while (next < jumps.size() && jumps[next].time <= cell_end) {
            z1 += sde.l(jumps[next].size) * jumps[next].size;
            ++next;
        }
        traj.values[i + 1] = z1;
    }
    return traj;
}

DerivativeProcess derivative_diffusion_D0(LevyPath const& path, DiffusionTrajectory const& traj,
                                          DiffusionSDE const& sde)
{
    std::size_t const G = path.grid_size();
    double const dt = path.grid_step();
    auto const w = path.brownian();
    auto const& z = traj.values;
    std::vector<double> cont(G + 1);
    cont[G] = sde.sigma(z[G]);
    double prod = 1.0;
    for (std::size_t k = G; k-- > 0;) {
        cont[k] = sde.sigma(z[k]) * prod;
        prod *= 1.0 + sde.db(z[k]) * dt + sde.dsigma(z[k]) * (w[k + 1] - w[k]);
    }
    return DerivativeProcess(path.horizon(), std::move(cont), {});
}

DerivativeProcess derivative_diffusion_D0_closed(LevyPath const& path, DiffusionTrajectory const& traj,
                                                 DiffusionSDE const& sde)
{
    std::size_t const G = path.grid_size();
    double const dt = path.grid_step();
    auto const w = path.brownian();
    auto const& z = traj.values;
    std::vector<double> cont(G + 1);
    cont[G] = sde.sigma(z[G]);
    double expo = 0.0;
    for (std::size_t k = G; k-- > 0;) {
        cont[k] = sde.sigma(z[k]) * std::exp(expo);
        double const ds = sde.dsigma(z[k]);
        expo += ds * (w[k + 1] - w[k]) + (sde.db(z[k]) - 0.5 * ds * ds) * dt;
    }
    return DerivativeProcess(path.horizon(), std::move(cont), {});
}

double stopping_time_S(DiffusionTrajectory const& traj, DiffusionSDE const& sde)
{
    std::size_t const G = traj.values.size() - 1;
    for (std::size_t i = 0; i < G; ++i) {
        if (sde.sigma(traj.values[i]) != 0.0) {
            return traj.horizon * static_cast<double>(i) / static_cast<double>(G);
        }
    }
    return traj.horizon;
}

} // namespace lmc

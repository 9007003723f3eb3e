#include "lmc/malliavin.hpp"

#include "lmc/quadrature.hpp"
#include "lmc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lmc {

WeightK constant_weight(double c)
{
    std::ostringstream name;
    name << "const(" << c << ")";
    return WeightK{[c](double, double) { return c; }, [](double, double) { return 0.0; },
                   std::max(std::abs(c), std::numeric_limits<double>::min()), name.str()};
}

void validate_weight(WeightK const& k, LevyTriplet const& triplet)
{
    if (!k.k || !k.dt) {
        throw std::invalid_argument("weight '" + k.name + "': k and dt must both be set");
    }
    if (!(k.sup_bound > 0.0) || !std::isfinite(k.sup_bound)) {
        throw std::invalid_argument("weight '" + k.name + "': sup bound must be finite and positive");
    }
    double const T = triplet.horizon;
    double const delta = 1e-5 * T;
    for (double x : triplet.nu.representative_sizes()) {
        for (int i = 1; i <= 15; ++i) {
            double const t = T * i / 16.0;
            double const v = k.k(t, x);
            if (!(std::abs(v) <= k.sup_bound * (1.0 + 1e-12))) {
                std::ostringstream os;
                os << "weight '" << k.name << "': |k(" << t << ", " << x << ")| = " << std::abs(v)
                   << " exceeds its declared bound " << k.sup_bound;
                throw std::invalid_argument(os.str());
            }
            double const fd = (k.k(t + delta, x) - k.k(t - delta, x)) / (2.0 * delta);
            double const an = k.dt(t, x);
            if (!(std::abs(fd - an) <= 1e-4 * (1.0 + std::abs(an) + std::abs(v)))) {
                std::ostringstream os;
                os << "weight '" << k.name << "': time derivative mismatch at (" << t << ", " << x
                   << "): analytic " << an << " vs finite difference " << fd;
                throw std::invalid_argument(os.str());
            }
        }
    }
    try {
        auto const& nu = triplet.nu;
        (void)nu.integrate_time_space([&](double t, double x) { return std::abs(k.k(t, x)); }, T);
        (void)nu.integrate_time_space([&](double t, double x) { return k.k(t, x) * k.k(t, x); }, T);
        (void)nu.integrate_time_space([&](double t, double x) { return std::abs(k.dt(t, x)); }, T);
        (void)nu.integrate_time_space([&](double t, double x) { return k.dt(t, x) * k.dt(t, x); }, T);
    } catch (QuadratureError const& e) {
        throw std::invalid_argument("weight '" + k.name + "' is not integrable against dt x nu: "
                                    + e.what());
    }
}

SmoothFunctional scalar_functional(RealFn f, RealFn df, Kernel h, std::string name)
{
    SmoothFunctional F;
    F.f = [f = std::move(f)](std::span<double const> u) { return f(u[0]); };
    F.grad = [df = std::move(df)](std::span<double const> u) { return std::vector<double>{df(u[0])}; };
    F.kernels.push_back(std::move(h));
    F.name = std::move(name);
    return F;
}

void validate_functional(SmoothFunctional const& F, LevyTriplet const& triplet)
{
    if (!F.f || !F.grad || F.kernels.empty()) {
        throw std::invalid_argument("functional '" + F.name + "': f, grad and kernels must be set");
    }
    std::size_t const n = F.kernels.size();
    std::vector<double> u(n);
    for (int p = 0; p < 5; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = 2.0 * std::sin(1.3 * p + 0.7 * static_cast<double>(i) + 0.2);
        }
        auto const g = F.grad(u);
        if (g.size() != n) {
            throw std::invalid_argument("functional '" + F.name + "': gradient has wrong length");
        }
        for (std::size_t i = 0; i < n; ++i) {
            double const delta = 1e-5;
            auto up = u;
            auto down = u;
            up[i] += delta;
            down[i] -= delta;
            double const fd = (F.f(up) - F.f(down)) / (2.0 * delta);
            if (!(std::abs(fd - g[i]) <= 1e-5 * (1.0 + std::abs(g[i]) + std::abs(F.f(u))))) {
                std::ostringstream os;
                os << "functional '" << F.name << "': partial " << i << " is " << g[i]
                   << " but the finite difference gives " << fd;
                throw std::invalid_argument(os.str());
            }
        }
    }
    for (auto const& h : F.kernels) {
        validate_kernel(h, triplet);
    }
}

FunctionalEvaluator::FunctionalEvaluator(SmoothFunctional F, LevyTriplet const& triplet) : F_(std::move(F))
{
    compensators_.reserve(F_.kernels.size());
    for (auto const& h : F_.kernels) {
        compensators_.push_back(m_compensator(h, triplet));
    }
}

std::vector<double> FunctionalEvaluator::arguments(LevyPath const& path) const
{
    std::vector<double> args(F_.kernels.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
        args[i] = integrate_M(path, F_.kernels[i], compensators_[i]);
    }
    return args;
}

double FunctionalEvaluator::value(LevyPath const& path) const
{
    auto const args = arguments(path);
    return F_.f(args);
}

DerivativeProcess FunctionalEvaluator::derivative(LevyPath const& path, LambdaSet const& lambda,
                                                  WeightK const& k) const
{
    auto const args = arguments(path);
    return derivative(path, args, lambda, k);
}

DerivativeProcess FunctionalEvaluator::derivative(LevyPath const& path, std::span<double const> args,
                                                  LambdaSet const& lambda, WeightK const& k) const
{
    auto const g = F_.grad(args);
    DerivativeProcess out(path.horizon());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto d = derivative_M(path, F_.kernels[i], lambda, k);
        d *= g[i];
        out += d;
    }
    return out;
}

DerivativeProcess derivative_M(LevyPath const& path, Kernel const& h, LambdaSet const& lambda,
                               WeightK const& k)
{
    std::vector<double> cont;
    if (lambda.includes_zero && path.sigma() > 0.0) {
        cont.resize(path.grid_size() + 1);
        for (std::size_t i = 0; i < cont.size(); ++i) {
            cont[i] = path.sigma() * h.value(path.grid_time(i), 0.0);
        }
    }
    std::vector<StepTerm> steps;
    for (auto const& j : path.jumps()) {
        if (lambda.contains_jump(j.size)) {
            steps.push_back({j.time, k.k(j.time, j.size) * h.dt(j.time, j.size) * j.size});
        }
    }
    return DerivativeProcess(path.horizon(), std::move(cont), std::move(steps));
}

std::vector<double> alt_deterministic_part(Kernel const& h, LambdaSet const& lambda, WeightK const& k,
                                           LevyTriplet const& triplet, std::size_t grid_size)
{
    double const T = triplet.horizon;
    std::vector<double> out(grid_size + 1, 0.0);
    if (lambda.jumps.empty()) {
        return out;
    }
    auto const kh = [&](double y) {
        return quad::integrate([&](double s) { return k.k(s, y) * h.value(s, y); }, 0.0, T);
    };
    for (std::size_t i = 0; i <= grid_size; ++i) {
        double const t = i == grid_size ? T : T * static_cast<double>(i) / static_cast<double>(grid_size);
        // A(t): the two boundary terms of the integration by parts.
        double const a = triplet.nu.integrate(
            [&](double y) {
                double const h_dk_s = quad::integrate(
                    [&](double s) { return h.value(s, y) * k.dt(s, y) * s / T; }, 0.0, T);
                double const h_dk_tail = quad::integrate(
                    [&](double s) { return h.value(s, y) * k.dt(s, y); }, t, T);
                return y * (k.k(t, y) * h.value(t, y) - kh(y) / T - (h_dk_s - h_dk_tail));
            },
            &lambda.jumps);
        // C(t): compensator of the Ñ-integral.
        double const c = triplet.nu.integrate(
            [&](double y) {
                double const k_dh_s = quad::integrate(
                    [&](double s) { return k.k(s, y) * h.dt(s, y) * s / T; }, 0.0, T);
                double const k_dh_tail = quad::integrate(
                    [&](double s) { return k.k(s, y) * h.dt(s, y); }, t, T);
                return y * (k_dh_s - k_dh_tail);
            },
            &lambda.jumps);
        out[i] = a - c;
    }
    return out;
}

DerivativeProcess derivative_M_alt(LevyPath const& path, Kernel const& h, LambdaSet const& lambda,
                                   WeightK const& k, std::optional<std::vector<double>> deterministic)
{
    std::size_t const G = path.grid_size();
    std::vector<double> cont = deterministic ? std::move(*deterministic)
                                             : alt_deterministic_part(h, lambda, k, path.triplet(), G);
    if (cont.size() != G + 1) {
        throw std::invalid_argument("derivative_M_alt: precomputed part is on a different grid");
    }
    if (lambda.includes_zero && path.sigma() > 0.0) {
        for (std::size_t i = 0; i <= G; ++i) {
            cont[i] += path.sigma() * h.value(path.grid_time(i), 0.0);
        }
    }
    // Ñ-integral = N-integral minus C(t); C(t) already sits in `cont`.
    std::vector<StepTerm> steps;
    for (auto const& j : path.jumps()) {
        if (lambda.contains_jump(j.size)) {
            steps.push_back({j.time, k.k(j.time, j.size) * h.dt(j.time, j.size) * j.size});
        }
    }
    return DerivativeProcess(path.horizon(), std::move(cont), std::move(steps));
}

DerivativeProcess derivative_smooth(LevyPath const& path, SmoothFunctional const& F,
                                    LambdaSet const& lambda, WeightK const& k)
{
    return FunctionalEvaluator(F, path.triplet()).derivative(path, lambda, k);
}

namespace {

void require_subset(JumpSet const& theta, LambdaSet const& lambda, char const* who)
{
    if (!theta.subset_of(lambda.jumps)) {
        throw std::invalid_argument(std::string(who) + ": Theta = " + theta.describe()
                                    + " is not contained in Lambda = " + lambda.jumps.describe());
    }
}

std::size_t index_of(std::span<JumpRecord const> jumps, double time)
{
    auto const it = std::lower_bound(jumps.begin(), jumps.end(), time,
                                     [](JumpRecord const& j, double t) { return j.time < t; });
    return static_cast<std::size_t>(it - jumps.begin());
}

} // namespace

DerivativeProcess derivative_Jn(LevyPath const& path, JumpSet const& theta, LambdaSet const& lambda,
                                WeightK const& k, SimplexIntegrand const& phi)
{
    require_subset(theta, lambda, "derivative_Jn");
    auto const jumps = theta_jumps(path, theta);
    std::vector<double> coef(jumps.size(), 0.0);
    for_each_tuple(jumps, phi.arity, [&](Tuple pts) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            coef[index_of(jumps, pts[j].time)] += k.k(pts[j].time, pts[j].size) * phi.dt(pts, j);
        }
    });
    std::vector<StepTerm> steps;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        steps.push_back({jumps[i].time, coef[i]});
    }
    return DerivativeProcess(path.horizon(), {}, std::move(steps));
}

DerivativeProcess derivative_jump_functional(LevyPath const& path, JumpSet const& theta,
                                             LambdaSet const& lambda, WeightK const& k,
                                             SimplexIntegrand const& phi)
{
    require_subset(theta, lambda, "derivative_jump_functional");
    auto const jumps = theta_jumps(path, theta);
    std::size_t const n = phi.arity;
    if (jumps.size() < n) {
        return DerivativeProcess(path.horizon());
    }
    Tuple const first(jumps.data(), n);
    std::vector<StepTerm> steps;
    for (std::size_t j = 0; j < n; ++j) {
        steps.push_back({first[j].time, k.k(first[j].time, first[j].size) * phi.dt(first, j)});
    }
    return DerivativeProcess(path.horizon(), {}, std::move(steps));
}

double jump_functional_value(LevyPath const& path, JumpSet const& theta, SimplexIntegrand const& phi)
{
    auto const jumps = theta_jumps(path, theta);
    if (jumps.size() < phi.arity) {
        return 0.0;
    }
    return phi(Tuple(jumps.data(), phi.arity));
}

Kernel count_kernel(JumpSet const& theta)
{
    return Kernel{[theta](double, double y) { return theta.contains(y) ? 1.0 / y : 0.0; },
                  [](double, double) { return 0.0; }, "count(" + theta.describe() + ")"};
}

std::optional<LevyPath> shift_jump_times(LevyPath const& path, LambdaSet const& lambda, WeightK const& k,
                                         double t, double eps)
{
    double const T = path.horizon();
    std::vector<JumpRecord> moved(path.jumps().begin(), path.jumps().end());
    for (auto& j : moved) {
        if (lambda.contains_jump(j.size)) {
            double const dir = k.k(j.time, j.size) * (j.time / T - (t <= j.time ? 1.0 : 0.0));
            j.time += eps * dir;
        }
    }
    double prev = 0.0;
    for (auto const& j : moved) {
        if (!(j.time > prev) || j.time > T) {
            return std::nullopt;
        }
        prev = j.time;
    }
    return path.with_jumps(std::move(moved));
}

FiniteDifference finite_difference_path(LevyPath const& path, LambdaSet const& lambda, WeightK const& k,
                                        std::function<double(LevyPath const&)> const& F,
                                        DerivativeProcess const& analytic, double t, double eps)
{
    if (!(eps > 0.0)) {
        throw std::invalid_argument("finite difference step must be positive");
    }
    for (double e = eps; e > 1e-14 * path.horizon(); e *= 0.5) {
        auto const up = shift_jump_times(path, lambda, k, t, e);
        auto const down = shift_jump_times(path, lambda, k, t, -e);
        if (up && down) {
            return {analytic.at(t), (F(*up) - F(*down)) / (2.0 * e), e};
        }
    }
    throw std::runtime_error("finite difference: every admissible step reorders the jump times");
}

FiniteDifference finite_difference_check(LevyPath const& path, JumpSet const& theta,
                                         LambdaSet const& lambda, WeightK const& k,
                                         SimplexIntegrand const& phi, double t, double eps)
{
    auto const D = derivative_jump_functional(path, theta, lambda, k, phi);
    return finite_difference_path(
        path, lambda, k, [&](LevyPath const& p) { return jump_functional_value(p, theta, phi); }, D, t, eps);
}

double duality_weight(LevyPath const& path, TestFunction const& g, LambdaSet const& lambda, WeightK const& k)
{
    double const T = path.horizon();
    double acc = 0.0;
    if (lambda.includes_zero && path.sigma() > 0.0) {
        acc += brownian_integral(path, g.value);
    }
    double const total = g.primitive(T);
    double const mean = total / T;
    for (auto const& j : path.jumps()) {
        if (!lambda.contains_jump(j.size)) {
            continue;
        }
        double const s = j.time;
        double const gamma = s / T * total - g.primitive(s);
        acc += (g.value(s) - mean) * k.k(s, j.size) - k.dt(s, j.size) * gamma;
    }
    return acc;
}

DualityReport summarize_pairs(std::span<double const> lhs, std::span<double const> rhs, std::uint64_t seed)
{
    if (lhs.size() != rhs.size()) {
        throw std::invalid_argument("summarize_pairs: sample sizes differ");
    }
    std::vector<double> diff(lhs.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = lhs[i] - rhs[i];
    }
    auto const sl = sample_stats(lhs);
    auto const sr = sample_stats(rhs);
    auto const sd = sample_stats(diff);
    DualityReport r;
    r.lhs = sl.mean;
    r.rhs = sr.mean;
    r.stderr_lhs = sl.std_error;
    r.stderr_rhs = sr.std_error;
    r.stderr_diff = sd.std_error;
    r.n_paths = lhs.size();
    r.seed = seed;
    if (sd.std_error > 0.0) {
        r.z_score = std::abs(sd.mean) / sd.std_error;
    } else {
        r.degenerate = true;
        r.z_score = std::abs(sd.mean) <= 1e-14 * (1.0 + std::abs(sl.mean))
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
    }
    return r;
}

DualityReport duality_residual(MCConfig const& mc, std::shared_ptr<LevyTriplet const> triplet,
                               SmoothFunctional const& F, TestFunction const& g, LambdaSet const& lambda,
                               WeightK const& k)
{
    FunctionalEvaluator const eval(F, *triplet);
    auto const samples = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
        auto const args = eval.arguments(path);
        auto const D = eval.derivative(path, args, lambda, k);
        return std::pair{inner_with(D, g), eval.value_at(args) * duality_weight(path, g, lambda, k)};
    });
    std::vector<double> lhs(samples.size());
    std::vector<double> rhs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        lhs[i] = samples[i].first;
        rhs[i] = samples[i].second;
    }
    return summarize_pairs(lhs, rhs, mc.base_seed);
}

DualityReport product_duality_residual(MCConfig const& mc, std::shared_ptr<LevyTriplet const> triplet,
                                       SmoothFunctional const& F, SmoothFunctional const& G,
                                       TestFunction const& g, LambdaSet const& lambda, WeightK const& k)
{
    FunctionalEvaluator const ef(F, *triplet);
    FunctionalEvaluator const eg(G, *triplet);
    auto const samples = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
        auto const af = ef.arguments(path);
        auto const ag = eg.arguments(path);
        double const fv = ef.value_at(af);
        double const gv = eg.value_at(ag);
        double const lhs = gv * inner_with(ef.derivative(path, af, lambda, k), g)
                           + fv * inner_with(eg.derivative(path, ag, lambda, k), g);
        return std::pair{lhs, fv * gv * duality_weight(path, g, lambda, k)};
    });
    std::vector<double> lhs(samples.size());
    std::vector<double> rhs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        lhs[i] = samples[i].first;
        rhs[i] = samples[i].second;
    }
    return summarize_pairs(lhs, rhs, mc.base_seed);
}

} // namespace lmc

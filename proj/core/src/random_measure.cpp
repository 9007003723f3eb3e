#include "lmc/random_measure.hpp"

#include "lmc/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lmc {

Kernel time_independent_kernel(RealFn fn, std::string name)
{
    return Kernel{[fn = std::move(fn)](double, double x) { return fn(x); },
                  [](double, double) { return 0.0; }, std::move(name)};
}

void validate_kernel(Kernel const& h, LevyTriplet const& triplet)
{
    if (!h.value || !h.dt) {
        throw std::invalid_argument("kernel '" + h.name + "': value and dt must both be set");
    }
    double const T = triplet.horizon;
    double const delta = 1e-4 * T;
    std::vector<double> xs = triplet.nu.representative_sizes();
    xs.push_back(0.0);
    for (double x : xs) {
        for (int i = 1; i <= 7; ++i) {
            double const t = T * i / 8.0;
            double const fd = (h.value(t + delta, x) - h.value(t - delta, x)) / (2.0 * delta);
            double const an = h.dt(t, x);
            double const tol = 1e-3 * (1.0 + std::abs(an) + std::abs(h.value(t, x)));
            if (!(std::abs(fd - an) <= tol)) {
                std::ostringstream os;
                os << "kernel '" << h.name << "': time derivative mismatch at (t=" << t << ", x=" << x
                   << "): analytic " << an << " vs finite difference " << fd;
                throw std::invalid_argument(os.str());
            }
        }
    }
    try {
        (void)mu_inner(h, h, triplet);
    } catch (QuadratureError const& e) {
        throw std::invalid_argument("kernel '" + h.name + "' is not square integrable under mu: "
                                    + e.what());
    }
}

double mu_inner(Kernel const& h, Kernel const& g, LevyTriplet const& triplet)
{
    double const T = triplet.horizon;
    double acc = 0.0;
    if (triplet.sigma > 0.0) {
        acc += triplet.sigma * triplet.sigma
               * quad::integrate([&](double t) { return h.value(t, 0.0) * g.value(t, 0.0); }, 0.0, T);
    }
    acc += triplet.nu.integrate_time_space(
        [&](double t, double x) { return h.value(t, x) * g.value(t, x) * x * x; }, T);
    return acc;
}

double brownian_integral(LevyPath const& path, RealFn const& fn)
{
    auto const w = path.brownian();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        acc += fn(path.grid_time(i)) * (w[i + 1] - w[i]);
    }
    return acc;
}

double m_compensator(Kernel const& h, LevyTriplet const& triplet)
{
    return triplet.nu.integrate_time_space([&](double t, double x) { return h.value(t, x) * x; },
                                           triplet.horizon);
}

double integrate_M(LevyPath const& path, Kernel const& h, std::optional<double> compensator)
{
    double acc = 0.0;
    if (path.sigma() > 0.0) {
        acc += path.sigma() * brownian_integral(path, [&](double t) { return h.value(t, 0.0); });
    }
    for (auto const& j : path.jumps()) {
        acc += h.value(j.time, j.size) * j.size;
    }
    double const comp = compensator ? *compensator : m_compensator(h, path.triplet());
    return acc - comp;
}

double integrate_N(LevyPath const& path, SpaceTimeFn const& phi)
{
    double acc = 0.0;
    for (auto const& j : path.jumps()) {
        acc += phi(j.time, j.size);
    }
    return acc;
}

double tilde_compensator(SpaceTimeFn const& phi, LevyTriplet const& triplet)
{
    return triplet.nu.integrate_time_space(phi, triplet.horizon);
}

double integrate_tildeN(LevyPath const& path, SpaceTimeFn const& phi, std::optional<double> compensator)
{
    double const comp = compensator ? *compensator : tilde_compensator(phi, path.triplet());
    return integrate_N(path, phi) - comp;
}

FubiniResult fubini_residual(LevyPath const& path, ParamKernelFn const& f)
{
    auto const rule = quad::gauss_legendre_20(0.0, path.horizon());
    FubiniResult out;
    for (auto const& [u, w] : rule) {
        Kernel const slice{[&f, u = u](double t, double x) { return f(u, t, x); },
                           [](double, double) { return 0.0; }, "slice"};
        double const m = integrate_M(path, slice);
        out.lhs += w * m;
        out.scale += w * std::abs(m);
    }
    Kernel const outer{[&](double t, double x) {
                           double acc = 0.0;
                           for (auto const& [u, w] : rule) {
                               acc += w * f(u, t, x);
                           }
                           return acc;
                       },
                       [](double, double) { return 0.0; }, "u-integrated"};
    out.rhs = integrate_M(path, outer);
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

} // namespace lmc

#include "lmc/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lmc::quad {

namespace {
std::atomic<double> g_rel_tol{1e-13};
}

double default_rel_tol() noexcept
{
    return g_rel_tol.load(std::memory_order_relaxed);
}

void set_default_rel_tol(double tol)
{
    if (!(tol > 0.0 && tol < 1e-3)) {
        throw std::invalid_argument("quadrature tolerance must lie in (0, 1e-3)");
    }
    g_rel_tol.store(tol, std::memory_order_relaxed);
}

double integrate(std::function<double(double)> const& f, double a, double b, Options const& opts)
{
    if (a == b) {
        return 0.0;
    }
    if (a > b) {
        return -integrate(f, b, a, opts);
    }
    double error = 0.0;
    double l1 = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, opts.max_depth, opts.rel_tol, &error, &l1);
    auto const rejected = [&] {
        return !std::isfinite(value) || !std::isfinite(error) || error > opts.reject_fraction * std::max(1.0, l1);
    };
    // Algebraic endpoint singularities defeat the GK error estimate; the
    // double-exponential rule handles them when the interval is finite.
    if (rejected() && std::isfinite(a) && std::isfinite(b)) {
        try {
            // Nodes closer than 1e-60 to an endpoint are dropped: there a product
            // like x²·x^{-3/2} underflows to 0·inf.
            boost::math::quadrature::tanh_sinh<double> ts(15, 1e-60);
            auto const inner = [&](double x) { return x <= a || x >= b ? 0.0 : f(x); };
            value = ts.integrate(inner, a, b, opts.rel_tol, &error, &l1);
        } catch (std::exception const&) {
            value = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (rejected()) {
        std::ostringstream os;
        os << "quadrature on (" << a << ", " << b << ") did not converge: value=" << value
           << " error=" << error << " (integrand divergent or not integrable?)";
        throw QuadratureError(os.str());
    }
    return value;
}

std::vector<std::pair<double, double>> gauss_legendre_20(double a, double b)
{
    using rule = boost::math::quadrature::gauss<double, 20>;
    auto const& x = rule::abscissa();
    auto const& w = rule::weights();
    double const half = 0.5 * (b - a);
    double const mid = 0.5 * (a + b);
    std::vector<std::pair<double, double>> nodes;
    nodes.reserve(20);
    // Boost stores nonnegative abscissae only; x[0] == 0 for even counts is absent.
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            nodes.emplace_back(mid, half * w[i]);
        } else {
            nodes.emplace_back(mid - half * x[i], half * w[i]);
            nodes.emplace_back(mid + half * x[i], half * w[i]);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

} // namespace lmc::quad

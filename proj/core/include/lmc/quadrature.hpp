#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lmc {

class QuadratureError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace quad {

/// Process-wide default for Options::rel_tol (initially 1e-13).
double default_rel_tol() noexcept;
void set_default_rel_tol(double tol);

struct Options
{
    double rel_tol = default_rel_tol();
    unsigned max_depth = 20;
    // An error estimate above this fraction of max(1, |value|) is treated as
    // divergence rather than a converged answer.
    double reject_fraction = 1e-7;
};

/// Adaptive Gauss–Kronrod on (a, b); endpoints are never evaluated. On a
/// finite interval a rejected estimate is retried with tanh-sinh, which copes
/// with integrable endpoint singularities. Infinite limits allowed.
double integrate(std::function<double(double)> const& f, double a, double b,
                 Options const& opts = {});

/// Fixed Gauss–Legendre rule on [a, b] (20 nodes): (node, weight) pairs.
std::vector<std::pair<double, double>> gauss_legendre_20(double a, double b);

} // namespace quad
} // namespace lmc

#include "lmc/interval_set.hpp"
#include "lmc/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lmc;

TEST_CASE("smooth integrals")
{
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi)
          == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(quad::integrate([](double x) { return std::exp(-x * x); }, -kInfinity, kInfinity)
          == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("endpoint singularity")
{
    // ∫₀¹ x^{-1/2} dx = 2
    CHECK(quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0)
          == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("divergent integral is reported")
{
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / (x * x); }, 0.0, 1.0), QuadratureError);
}

TEST_CASE("gauss-legendre is exact for degree 39")
{
    double s = 0.0;
    for (auto [x, w] : quad::gauss_legendre_20(0.0, 2.0)) {
        s += w * std::pow(x, 39);
    }
    CHECK(s == doctest::Approx(std::pow(2.0, 40) / 40).epsilon(1e-13));
}

TEST_CASE("default tolerance is process wide and validated")
{
    double const old = quad::default_rel_tol();
    quad::set_default_rel_tol(1e-8);
    CHECK(quad::Options{}.rel_tol == 1e-8);
    quad::set_default_rel_tol(old);
    CHECK_THROWS(quad::set_default_rel_tol(0.0));
    CHECK_THROWS(quad::set_default_rel_tol(0.5));
}

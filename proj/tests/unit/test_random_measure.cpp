#include "lmc/random_measure.hpp"
#include "lmc/quadrature.hpp"
#include "lmc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace lmc;

namespace {

LevyTriplet discrete(std::vector<Atom> atoms, double T = 1.0, double sigma = 0.0)
{
    LevyTriplet t;
    t.nu = LevyMeasure(DiscreteMeasure{std::move(atoms)});
    t.horizon = T;
    t.sigma = sigma;
    return t;
}

Kernel kernel_t()
{
    return Kernel{[](double t, double) { return t; }, [](double, double) { return 1.0; }, "t"};
}

} // namespace

TEST_CASE("M(h) hand cases")
{
    // Single jump (0.4, 2), h = t, ν = δ₂: 0.8 − ∫₀¹ 2t dt.
    auto const trip = discrete({{2.0, 1.0}});
    auto const path = LevyPath::from_jumps(trip, {{0.4, 2.0}});
    CHECK(integrate_M(path, kernel_t()) == doctest::Approx(-0.2).epsilon(1e-12));

    // ν = δ₁, h = 1, three jumps, T = 2: N − T.
    auto const trip2 = discrete({{1.0, 1.0}}, 2.0);
    auto const p2 = LevyPath::from_jumps(trip2, {{0.1, 1.0}, {0.9, 1.0}, {1.7, 1.0}});
    auto const one = time_independent_kernel([](double) { return 1.0; });
    CHECK(integrate_M(p2, one) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_tildeN(p2, [](double, double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("M(1) is W(T) for a pure Brownian triplet")
{
    auto const trip = std::make_shared<LevyTriplet const>(discrete({}, 1.3, 1.0));
    auto const path = simulate_path(trip, 50, 17);
    auto const one = time_independent_kernel([](double) { return 1.0; });
    CHECK(integrate_M(path, one) == doctest::Approx(path.brownian().back()).epsilon(1e-13));
}

TEST_CASE("Brownian part is a left-point sum")
{
    auto const trip = std::make_shared<LevyTriplet const>(discrete({}, 1.0, 0.5));
    auto const path = simulate_path(trip, 8, 3);
    auto const w = path.brownian();
    double oracle = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        oracle += (i / 8.0) * (w[i + 1] - w[i]);
    }
    CHECK(integrate_M(path, kernel_t()) == doctest::Approx(0.5 * oracle).epsilon(1e-13));
}

TEST_CASE("N integrals")
{
    auto const trip = discrete({{1.0, 1.0}, {-3.0, 1.0}});
    auto const path = LevyPath::from_jumps(trip, {{0.2, 1.0}, {0.5, -3.0}});
    CHECK(integrate_N(path, [](double, double x) { return x; }) == -2.0);
    CHECK(integrate_N(path.with_jumps({}), [](double, double x) { return x; }) == 0.0);
    CHECK(integrate_N(path, [](double, double) { return 1.0; }) == 2.0);
    CHECK(integrate_tildeN(path, [](double, double) { return 0.0; }) == 0.0);

    // two-term oracle: Σφ(jumps) − Σ_atoms mass·∫₀¹ φ(t, a) dt
    auto phi = [](double t, double x) { return std::sin(3 * t) * x + t * t; };
    double const comp = (1.0 - std::cos(3.0)) / 3.0 * (1.0 - 3.0) + 2.0 / 3.0;
    double const direct = phi(0.2, 1.0) + phi(0.5, -3.0);
    CHECK(integrate_tildeN(path, phi) == doctest::Approx(direct - comp).epsilon(1e-12));
}

TEST_CASE("compensator of a density measure")
{
    LevyTriplet trip;
    trip.nu = LevyMeasure(DensityMeasure{[](double x) { return std::exp(-x); }, {Interval::open(0.5, 3.0)}, {}});
    Kernel h{[](double t, double x) { return t * std::cos(x); }, [](double, double x) { return std::cos(x); }, ""};
    // ∫₀¹ t dt · ∫ x cos x e^{-x} dx, inner by a fine composite Simpson rule
    int const m = 20000;
    double const a = 0.5;
    double const b = 3.0;
    double const step = (b - a) / m;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        double const x = a + step * i;
        double const w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * x * std::cos(x) * std::exp(-x);
    }
    CHECK(m_compensator(h, trip) == doctest::Approx(0.5 * s * step / 3.0).epsilon(1e-10));
}

TEST_CASE("mu inner product")
{
    auto const trip = discrete({{2.0, 0.5}}, 2.0, 0.3);
    auto const one = time_independent_kernel([](double) { return 1.0; });
    // σ²T + T·x²·mass
    CHECK(mu_inner(one, one, trip) == doctest::Approx(0.09 * 2.0 + 2.0 * 4.0 * 0.5).epsilon(1e-12));
}

TEST_CASE("kernel validation")
{
    auto const trip = discrete({{1.0, 1.0}});
    CHECK_NOTHROW(validate_kernel(kernel_t(), trip));
    Kernel wrong{[](double t, double) { return t * t; }, [](double, double) { return 1.0; }, "wrong"};
    CHECK_THROWS_AS(validate_kernel(wrong, trip), std::invalid_argument);
}

TEST_CASE("Fubini identity")
{
    auto const trip = std::make_shared<LevyTriplet const>(discrete({{1.0, 2.0}, {-0.5, 1.0}}, 1.0, 0.8));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto const path = simulate_path(trip, 64, seed);
        // u-independent: both sides T·M(f)
        auto const flat = fubini_residual(path, [](double, double t, double x) { return std::cos(t) + x; });
        CHECK(flat.relative() <= 1e-12);
        auto const r = fubini_residual(path, [](double u, double t, double x) { return u * t * x + u * std::sin(t); });
        CHECK(r.relative() <= 1e-10);
    }
}

TEST_CASE("isometry by Monte Carlo")
{
    auto const trip = std::make_shared<LevyTriplet const>(discrete({{1.0, 2.0}, {-0.5, 1.0}}, 1.0, 0.8));
    Kernel h{[](double t, double x) { return 1.0 + t * x; }, [](double, double x) { return x; }, ""};
    double const expected = mu_inner(h, h, *trip);
    double const comp = m_compensator(h, *trip);
    int const n = 40000;
    double s = 0.0;
    double s2 = 0.0;
    double s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        double const v = integrate_M(simulate_path(trip, 256, path_seed(8, i)), h, comp);
        s += v;
        s2 += v * v;
        s4 += v * v * v * v;
    }
    double const m2 = s2 / n;
    double const se = std::sqrt((s4 / n - m2 * m2) / n);
    CHECK(std::abs(s / n) < 5 * std::sqrt(m2 / n));
    // grid error on the Brownian part is O(1/256)
    CHECK(std::abs(m2 - expected) < 5 * se + 0.01);
}

#include "lmc/levy.hpp"
#include "lmc/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

using namespace lmc;

namespace {

LevyTriplet poisson_triplet(double rate, double size, double T, double sigma = 0.0)
{
    LevyTriplet t;
    t.nu = LevyMeasure(DiscreteMeasure{{{size, rate}}});
    t.horizon = T;
    t.sigma = sigma;
    return t;
}

// x^{-3/2} on (0, 1]: infinite activity, ∫x² dν = 2/3.
LevyMeasure stable_like()
{
    return LevyMeasure(TruncatableMeasure{"stable-like", [](double x) { return std::pow(x, -1.5); },
                                          {Interval{0.0, 1.0, false, true}}});
}

// Kolmogorov–Smirnov distance of a sample to the uniform law on (0, T).
double ks_uniform(std::vector<double> x, double T)
{
    std::sort(x.begin(), x.end());
    double d = 0.0;
    double const n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const F = x[i] / T;
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

} // namespace

TEST_CASE("jump sets")
{
    auto const band = JumpSet::symmetric_band(0.5, 2.0);
    CHECK(band.contains(1.0));
    CHECK(band.contains(-1.0));
    CHECK_FALSE(band.contains(0.5));
    CHECK_FALSE(band.contains(2.0));
    CHECK_FALSE(band.contains(0.0));
    CHECK(band.distance_from_zero() == 0.5);
    CHECK(band.bounded());
    CHECK(band.subset_of(JumpSet::all_nonzero()));
    CHECK_FALSE(JumpSet::all_nonzero().subset_of(band));
    CHECK_FALSE(JumpSet::all_nonzero().contains(0.0));
    CHECK(JumpSet::all_nonzero().distance_from_zero() == 0.0);
    CHECK(JumpSet::point(-0.9).contains(-0.9));
    CHECK(JumpSet::point(-0.9).subset_of(band));
    CHECK(JumpSet{}.empty());
}

TEST_CASE("discrete measure")
{
    LevyMeasure nu(DiscreteMeasure{{{1.0, 0.5}, {-2.0, 1.5}}});
    CHECK(nu.finite());
    CHECK(nu.discrete());
    CHECK(nu.total_mass() == doctest::Approx(2.0));
    CHECK(nu.mass(JumpSet{Interval::open(0.0, kInfinity)}) == doctest::Approx(0.5));
    CHECK(nu.integrate([](double x) { return x * x; }) == doctest::Approx(0.5 + 6.0));
    // Sampling frequencies follow the masses.
    int pos = 0;
    int const n = 40000;
    StreamRng rng(1, Stream::auxiliary);
    for (int i = 0; i < n; ++i) {
        double const x = nu.sample(rng.uniform_open());
        REQUIRE((x == 1.0 || x == -2.0));
        pos += x > 0 ? 1 : 0;
    }
    CHECK(std::abs(pos / double(n) - 0.25) < 5 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("invalid measures are rejected")
{
    CHECK_THROWS_AS(LevyMeasure(DiscreteMeasure{{{0.0, 1.0}}}), LevyMeasureError);
    CHECK_THROWS_AS(LevyMeasure(DiscreteMeasure{{{1.0, -1.0}}}), LevyMeasureError);
    CHECK_THROWS(LevyMeasure(DensityMeasure{[](double) { return 1.0; }, {Interval::open(-1.0, 1.0)}, {}}));
}

TEST_CASE("density measure quantile table")
{
    // constant density 2 on (0.1, 1): uniform jump sizes
    LevyMeasure nu(DensityMeasure{[](double) { return 2.0; }, {Interval::open(0.1, 1.0)}, {}});
    CHECK(nu.total_mass() == doctest::Approx(1.8).epsilon(1e-12));
    for (double u : {0.01, 0.25, 0.5, 0.9}) {
        CHECK(nu.sample(u) == doctest::Approx(0.1 + 0.9 * u).epsilon(1e-8));
    }
}

TEST_CASE("infinite activity measure")
{
    auto const nu = stable_like();
    CHECK_FALSE(nu.finite());
    CHECK_THROWS(nu.total_mass());
    CHECK_THROWS(nu.sample(0.5));
    CHECK(nu.integrate([](double x) { return x * x; }) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    double prev = 0.0;
    for (double eps : {0.5, 0.1, 0.01, 0.001}) {
        auto const t = nu.truncated(eps);
        CHECK(t.finite());
        double const m = t.total_mass();
        CHECK(m == doctest::Approx(2.0 * (1.0 / std::sqrt(eps) - 1.0)).epsilon(1e-10));
        CHECK(m > prev);
        prev = m;
        double const x = t.sample(0.5);
        CHECK(x > eps);
        CHECK(x <= 1.0);
    }
    LevyTriplet trip;
    trip.nu = nu;
    CHECK_THROWS(simulate_path(trip, 16, 1));
}

TEST_CASE("triplet validation")
{
    LevyTriplet t;
    t.sigma = -1.0;
    CHECK_THROWS(t.validate());
    t.sigma = 0.0;
    t.horizon = 0.0;
    CHECK_THROWS(t.validate());
}

TEST_CASE("path construction rules")
{
    auto const trip = poisson_triplet(1.0, 1.0, 1.0);
    CHECK_THROWS(LevyPath::from_jumps(trip, {{0.5, 1.0}, {0.4, 1.0}}));
    CHECK_THROWS(LevyPath::from_jumps(trip, {{0.0, 1.0}}));
    CHECK_THROWS(LevyPath::from_jumps(trip, {{1.5, 1.0}}));
    CHECK_THROWS(LevyPath::from_jumps(trip, {{0.5, 0.0}}));
    CHECK_NOTHROW(LevyPath::from_jumps(trip, {{1.0, 1.0}}));
}

TEST_CASE("compensated Levy-Ito value")
{
    // ν = δ₁, jumps at 0.3 and 0.7: X_{0.5} = 1 − 0.5·1.
    auto const trip = poisson_triplet(1.0, 1.0, 1.0);
    auto const path = LevyPath::from_jumps(trip, {{0.3, 1.0}, {0.7, 1.0}});
    CHECK(evaluate_X(path, 0.5) == doctest::Approx(0.5));
    CHECK(evaluate_X(path, 1.0) == doctest::Approx(1.0));
    CHECK(evaluate_X(path, 0.0) == 0.0);
    CHECK_THROWS(evaluate_X(path, 1.5));

    // Large jumps are not compensated.
    auto const big = poisson_triplet(1.0, 2.0, 1.0);
    auto const p2 = LevyPath::from_jumps(big, {{0.3, 2.0}});
    CHECK(evaluate_X(p2, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("restriction and counting")
{
    LevyTriplet trip;
    trip.nu = LevyMeasure(DiscreteMeasure{{{1.0, 1.0}, {-2.0, 1.0}}});
    auto const path = LevyPath::from_jumps(trip, {{0.1, 1.0}, {0.2, -2.0}, {0.6, 1.0}});
    JumpSet const pos{Interval::open(0.0, kInfinity)};
    CHECK(count_jumps(path, pos) == 2);
    auto const r = restrict_jumps(path, pos);
    REQUIRE(r.jumps().size() == 2);
    CHECK(r.jumps()[1].time == 0.6);
    auto const other = path.with_jumps({});
    CHECK(other.jumps().empty());
    CHECK(other.seed() == path.seed());
}

TEST_CASE("simulated paths: Poisson count, uniform times, Brownian increments")
{
    auto const trip = std::make_shared<LevyTriplet const>(poisson_triplet(2.0, 1.0, 1.5, 0.7));
    std::size_t const n = 20000;
    double s = 0.0;
    double s2 = 0.0;
    std::vector<double> times;
    double inc2 = 0.0;
    std::size_t n_inc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto const p = simulate_path(trip, 16, path_seed(5, i));
        double const k = static_cast<double>(p.jumps().size());
        s += k;
        s2 += k * k;
        for (auto const& j : p.jumps()) {
            times.push_back(j.time);
        }
        auto const w = p.brownian();
        CHECK(w[0] == 0.0);
        for (std::size_t g = 1; g < w.size(); ++g) {
            double const d = w[g] - w[g - 1];
            inc2 += d * d;
            ++n_inc;
        }
    }
    double const lam = 3.0;
    double const mean = s / n;
    CHECK(std::abs(mean - lam) < 5 * std::sqrt(lam / n));
    CHECK(std::abs(s2 / n - mean * mean - lam) < 0.1);
    // KS at the 0.1% level
    CHECK(ks_uniform(times, 1.5) < 1.95 / std::sqrt(static_cast<double>(times.size())));
    double const dt = 1.5 / 16;
    CHECK(std::abs(inc2 / n_inc / dt - 1.0) < 5 * std::sqrt(2.0 / n_inc));
}

TEST_CASE("simulation is reproducible and serializable")
{
    auto const trip = std::make_shared<LevyTriplet const>(poisson_triplet(3.0, -0.5, 2.0, 1.1));
    auto const a = simulate_path(trip, 32, 99);
    auto const b = simulate_path(trip, 32, 99);
    CHECK(std::equal(a.brownian().begin(), a.brownian().end(), b.brownian().begin()));
    CHECK(std::equal(a.jumps().begin(), a.jumps().end(), b.jumps().begin(), b.jumps().end()));
    auto const c = path_from_json(path_to_json(a), *trip);
    CHECK(c.seed() == 99);
    CHECK(std::equal(a.brownian().begin(), a.brownian().end(), c.brownian().begin(), c.brownian().end()));
    CHECK(std::equal(a.jumps().begin(), a.jumps().end(), c.jumps().begin(), c.jumps().end()));
    // W is linear between nodes.
    double const h = a.grid_step();
    CHECK(a.brownian_at(2.5 * h) == doctest::Approx(0.5 * (a.brownian()[2] + a.brownian()[3])));
}

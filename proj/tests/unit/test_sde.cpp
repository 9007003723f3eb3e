#include "lmc/sde.hpp"

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

AdditiveJumpSDE linear_additive(double a, double b, double x0)
{
    // f(z) = a z + b, h(y) = y
    return AdditiveJumpSDE{[a, b](double z) { return a * z + b; }, [a](double) { return a; },
                           [](double y) { return y; }, x0, "linear"};
}

MultiplicativeJumpSDE linear_multiplicative(double a, double b, double x0)
{
    MultiplicativeJumpSDE s;
    s.f = [a, b](double z) { return a * z + b; };
    s.df = [a](double) { return a; };
    s.d2f = [](double) { return 0.0; };
    s.g = [](double z) { return 1.0 + 0.3 * std::sin(z); };
    s.dg = [](double z) { return 0.3 * std::cos(z); };
    s.h = [](double y) { return 0.5 * y; };
    s.x0 = x0;
    s.g_sup = 1.3;
    s.h_sup = 1.0;
    return s;
}

WeightK weight_cos()
{
    return WeightK{[](double t, double x) { return std::cos(t) / (1 + x * x); },
                   [](double t, double x) { return -std::sin(t) / (1 + x * x); }, 1.0, "cos"};
}

} // namespace

TEST_CASE("flow of a linear drift")
{
    Flow const flow([](double z) { return -z; }, [](double) { return -1.0; }, 1e-3);
    CHECK(flow.value(0.2, 1.2, 3.0) == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(flow.d_x(0.0, 0.7, 2.0) == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
    CHECK(flow.d_s(0.0, 0.7, 2.0) == doctest::Approx(2.0 * std::exp(-0.7)).epsilon(1e-12));
    CHECK(flow.d_t(0.0, 0.7, 2.0) == doctest::Approx(-2.0 * std::exp(-0.7)).epsilon(1e-12));
    CHECK_THROWS(flow.advance(1.0, -0.1));
    CHECK_THROWS(Flow([](double z) { return z; }, [](double) { return 1.0; }, 0.0));
}

TEST_CASE("flow semigroup and partials of a nonlinear drift")
{
    Flow const flow([](double z) { return std::sin(z) + 0.5; }, [](double z) { return std::cos(z); }, 1.0 / 4096);
    double const x = 0.3;
    double const direct = flow.value(0.0, 1.0, x);
    double const composed = flow.value(0.4, 1.0, flow.value(0.0, 0.4, x));
    CHECK(direct == doctest::Approx(composed).epsilon(1e-11));
    double const e = 1e-5;
    double const fd_x = (flow.value(0.0, 1.0, x + e) - flow.value(0.0, 1.0, x - e)) / (2 * e);
    CHECK(flow.d_x(0.0, 1.0, x) == doctest::Approx(fd_x).epsilon(1e-8));
    double const fd_s = (flow.value(0.2 + e, 1.0, x) - flow.value(0.2 - e, 1.0, x)) / (2 * e);
    CHECK(flow.d_s(0.2, 1.0, x) == doctest::Approx(fd_s).epsilon(1e-8));
    double const fd_t = (flow.value(0.2, 0.9 + e, x) - flow.value(0.2, 0.9 - e, x)) / (2 * e);
    CHECK(flow.d_t(0.2, 0.9, x) == doctest::Approx(fd_t).epsilon(1e-8));
}

TEST_CASE("additive equation: hand solutions")
{
    auto const trip = discrete({{1.0, 1.0}, {-2.0, 1.0}}, 2.0);
    auto const path = LevyPath::from_jumps(trip, {{0.5, 1.0}, {1.2, -2.0}});

    auto const zero_drift = linear_additive(0.0, 0.0, 0.7);
    auto const t0 = solve_additive_jump(path, zero_drift);
    CHECK(t0.terminal == doctest::Approx(0.7 + 1.0 - 2.0));
    CHECK(t0.at(1.0, make_flow(zero_drift.f, zero_drift.df, 2.0)) == doctest::Approx(1.7));

    auto const decay = linear_additive(-1.0, 0.0, 3.0);
    auto const t1 = solve_additive_jump(path.with_jumps({}), decay);
    CHECK(t1.terminal == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-12));

    auto const one = path.with_jumps({{0.5, 1.0}});
    auto const t2 = solve_additive_jump(one, decay);
    CHECK(t2.terminal == doctest::Approx((3.0 * std::exp(-0.5) + 1.0) * std::exp(-1.5)).epsilon(1e-10));
    CHECK(t2.pre[0] == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("additive derivative")
{
    auto const trip = discrete({{1.0, 1.0}}, 1.0);
    SUBCASE("constant drift gives the zero process")
    {
        auto const path = LevyPath::from_jumps(trip, {{0.3, 1.0}});
        auto const sde = linear_additive(0.0, 2.0, 0.0);
        auto const d = derivative_additive(solve_additive_jump(path, sde), sde, constant_weight(1.0));
        for (auto const& s : d.steps()) {
            CHECK(s.coef == 0.0);
        }
    }
    SUBCASE("f(z) = z, h = 1, single jump")
    {
        auto const path = LevyPath::from_jumps(trip, {{0.3, 1.0}});
        auto sde = linear_additive(1.0, 0.0, 0.5);
        sde.h = [](double) { return 1.0; };
        auto const k = weight_cos();
        auto const d = derivative_additive(solve_additive_jump(path, sde), sde, k);
        REQUIRE(d.steps().size() == 1);
        CHECK(d.steps()[0].coef == doctest::Approx(std::exp(0.7) * -1.0 * k(0.3, 1.0)).epsilon(1e-11));
    }
    SUBCASE("finite difference along jump-time shifts")
    {
        auto const t = std::make_shared<LevyTriplet const>(discrete({{1.0, 1.5}, {-0.6, 1.0}}, 1.5));
        AdditiveJumpSDE sde{[](double z) { return std::atan(z) + 0.2 * z; },
                            [](double z) { return 1.0 / (1.0 + z * z) + 0.2; }, [](double y) { return y; }, 0.1, ""};
        auto const k = weight_cos();
        for (std::uint64_t s = 0; s < 40; ++s) {
            auto const path = simulate_path(t, 4, s);
            if (path.jumps().empty()) {
                continue;
            }
            auto const d = derivative_additive(solve_additive_jump(path, sde), sde, k);
            for (double tt : {0.2, 0.9, 1.4}) {
                auto const fd = finite_difference_path(
                    path, LambdaSet::jumps_only(), k, [&](LevyPath const& p) { return solve_additive_jump(p, sde).terminal; },
                    d, tt, 1e-5);
                CHECK(std::abs(fd.analytic - fd.numeric) <= 1e-5 * std::max(1.0, std::abs(fd.analytic)));
            }
        }
    }
}

TEST_CASE("monotone weight")
{
    auto const k = monotone_weight([](double y) { return y; }, Monotone::increasing);
    CHECK(k(0.0, 2.0) == -1.0);
    CHECK(k(0.0, 0.5) == -0.5);
    auto const kd = monotone_weight([](double y) { return y; }, Monotone::decreasing);
    CHECK(kd(0.0, 0.5) == 0.5);

    // (f(Z−) − f(Z)) k(ΔX) > 0 for increasing f
    auto const trip = std::make_shared<LevyTriplet const>(discrete({{1.0, 3.0}, {-2.0, 3.0}}, 1.0));
    AdditiveJumpSDE sde{[](double z) { return std::tanh(z) + z; }, [](double z) { return 2.0 - std::pow(std::tanh(z), 2); },
                        [](double y) { return y; }, 0.0, ""};
    std::size_t jumps = 0;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        auto const tr = solve_additive_jump(simulate_path(trip, 4, s), sde);
        for (std::size_t i = 0; i < tr.n_jumps(); ++i) {
            CHECK((sde.f(tr.pre[i]) - sde.f(tr.post[i])) * k(0.0, tr.jumps[i].size) > 0.0);
            ++jumps;
        }
    }
    CHECK(jumps >= 10000);
}

TEST_CASE("multiplicative derivative")
{
    auto const trip = discrete({{1.0, 1.0}, {-0.8, 1.0}}, 1.0);
    auto const k = weight_cos();

    SUBCASE("g = 1 reduces to the additive case")
    {
        auto m = linear_multiplicative(0.7, 0.1, 0.2);
        m.f = [](double z) { return std::sin(z) + 2 * z; };
        m.df = [](double z) { return std::cos(z) + 2.0; };
        m.g = [](double) { return 1.0; };
        m.dg = [](double) { return 0.0; };
        AdditiveJumpSDE a{m.f, m.df, m.h, m.x0, ""};
        auto const path = LevyPath::from_jumps(trip, {{0.2, 1.0}, {0.5, -0.8}, {0.9, 1.0}});
        auto const dm = derivative_multiplicative(solve_multiplicative(path, m), m, k);
        auto const da = derivative_additive(solve_additive_jump(path, a), a, k);
        REQUIRE(dm.steps().size() == da.steps().size());
        for (std::size_t i = 0; i < da.steps().size(); ++i) {
            CHECK(dm.steps()[i].coef == doctest::Approx(da.steps()[i].coef).epsilon(1e-12));
        }
    }

    SUBCASE("one jump")
    {
        auto const m = linear_multiplicative(0.7, 0.1, 0.2);
        auto const path = LevyPath::from_jumps(trip, {{0.4, -0.8}});
        auto const tr = solve_multiplicative(path, m);
        auto const d = derivative_multiplicative(tr, m, k);
        double const pre = tr.pre[0];
        double const post = tr.post[0];
        double const c = std::exp(0.7 * 0.6) * (m.f(pre) - m.f(post) + m.f(pre) * m.h(-0.8) * m.dg(pre)) * k(0.4, -0.8);
        REQUIRE(d.steps().size() == 1);
        CHECK(d.steps()[0].coef == doctest::Approx(c).epsilon(1e-10));
    }

    SUBCASE("two jumps against the chain-rule expansion")
    {
        double const a = 0.7;
        double const b = 0.1;
        auto const m = linear_multiplicative(a, b, 0.2);
        double const T1 = 0.3;
        double const T2 = 0.75;
        double const y1 = 1.0;
        double const y2 = -0.8;
        auto const path = LevyPath::from_jumps(trip, {{T1, y1}, {T2, y2}});
        auto const d = derivative_multiplicative(solve_multiplicative(path, m), m, k);
        // closed-form flow of the linear drift
        auto phi = [&](double x, double dt) { return (x + b / a) * std::exp(a * dt) - b / a; };
        double const za = phi(0.2, T1);
        double const zb = za + m.h(y1) * m.g(za);
        double const zc = phi(zb, T2 - T1);
        double const zd = zc + m.h(y2) * m.g(zc);
        double const E2 = std::exp(a * (T2 - T1));
        double const E3 = std::exp(a * (1.0 - T2));
        double const dZ_dT2 = E3 * ((1 + m.h(y2) * m.dg(zc)) * m.f(zc) - m.f(zd));
        double const dZ_dT1 = E3 * (1 + m.h(y2) * m.dg(zc)) * E2 * ((1 + m.h(y1) * m.dg(za)) * m.f(za) - m.f(zb));
        REQUIRE(d.steps().size() == 2);
        CHECK(d.steps()[0].coef == doctest::Approx(dZ_dT1 * k(T1, y1)).epsilon(1e-8));
        CHECK(d.steps()[1].coef == doctest::Approx(dZ_dT2 * k(T2, y2)).epsilon(1e-8));
    }
}

TEST_CASE("Wronskian condition")
{
    LevyMeasure const nu(DiscreteMeasure{{{1.0, 1.0}}});
    auto m = linear_multiplicative(1.0, 0.0, 0.0);
    m.g = [](double) { return 1.0; };
    m.dg = [](double) { return 0.0; };
    m.f2_sup = 0.0;
    m.g_sup = 1.0;
    m.x_lo = 0.5;
    m.x_hi = 2.0;
    // W = −f′g = −1 everywhere, f″ = 0
    CHECK(wronskian(m, 1.0) == -1.0);
    CHECK(wronskian_condition(m, nu));
    m.h = [](double) { return 0.0; };
    CHECK_FALSE(wronskian_condition(m, nu));
}

TEST_CASE("weights for the density criteria")
{
    auto const hp = last_jump_weight(0.4, 1.0);
    CHECK(hp(0.3, 1.0) == 0.0);
    CHECK(hp(0.4, 1.0) == 0.0);
    CHECK(hp(0.5, 1.0) == doctest::Approx(0.01));
    double const e = 1e-6;
    CHECK(hp.dt(0.7, 1.0) == doctest::Approx((hp(0.7 + e, 1.0) - hp(0.7 - e, 1.0)) / (2 * e)).epsilon(1e-6));
    CHECK_THROWS(last_jump_weight(1.0, 1.0));

    auto const lm = local_monotone_weight([](double y) { return 3 * y; }, 0.5, 1.0);
    CHECK(lm(0.6, 1.0) == 0.0);
    CHECK(lm(0.3, 1.0) == doctest::Approx(-0.04));
    CHECK(lm(0.3, 0.1) == doctest::Approx(-0.04 * 0.3));
    CHECK(lm.dt(0.3, 0.1) == doctest::Approx((lm(0.3 + e, 0.1) - lm(0.3 - e, 0.1)) / (2 * e)).epsilon(1e-6));
}

TEST_CASE("Euler scheme with jumps")
{
    DiffusionSDE zero{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                      [](double) { return 0.0; }, [](double) { return 2.0; }, 1.0, ""};
    auto const trip = discrete({{1.0, 1.0}, {-0.5, 1.0}}, 1.0, 1.0);
    auto const path = LevyPath::from_jumps(trip, {{0.3, 1.0}, {0.6, -0.5}}, 10);
    auto const z = solve_diffusion(path, zero);
    CHECK(z.terminal() == doctest::Approx(1.0 + 2.0 - 1.0));
    // jump at 0.3 lands at the end of cell (0.2, 0.3]
    CHECK(z.values[2] == 1.0);
    CHECK(z.values[3] == doctest::Approx(3.0));

    DiffusionSDE bm{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 1.0; },
                    [](double) { return 0.0; }, [](double) { return 0.0; }, 0.5, ""};
    auto const bt = std::make_shared<LevyTriplet const>(discrete({}, 1.0, 1.0));
    auto const bp = simulate_path(bt, 64, 2);
    auto const bz = solve_diffusion(bp, bm);
    for (std::size_t i = 0; i <= 64; ++i) {
        CHECK(bz.values[i] == doctest::Approx(0.5 + bp.brownian()[i]).epsilon(1e-14));
    }

    DiffusionSDE lin{[](double z) { return -z; }, [](double) { return -1.0; }, [](double) { return 0.0; },
                     [](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, ""};
    double prev_err = 1.0;
    for (std::size_t G : {64, 256, 1024}) {
        auto const p = simulate_path(bt, G, 1);
        double const err = std::abs(solve_diffusion(p, lin).terminal() - std::exp(-1.0));
        CHECK(err < 1.0 / G);
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("Gaussian derivative of the diffusion")
{
    auto const bt = std::make_shared<LevyTriplet const>(discrete({{1.0, 1.0}}, 1.0, 1.0));
    auto const path = simulate_path(bt, 512, 5);

    DiffusionSDE flat{[](double) { return 0.3; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                      [](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, ""};
    auto const dz = derivative_diffusion_D0(path, solve_diffusion(path, flat), flat);
    for (double v : dz.continuous()) {
        CHECK(v == 0.0);
    }

    DiffusionSDE bm{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 1.0; },
                    [](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, ""};
    auto const d1 = derivative_diffusion_D0(path, solve_diffusion(path, bm), bm);
    for (double v : d1.continuous()) {
        CHECK(v == 1.0);
    }

    double const mu = 0.1;
    double const vol = 0.4;
    DiffusionSDE gbm{[mu](double z) { return mu * z; }, [mu](double) { return mu; },
                     [vol](double z) { return vol * z; }, [vol](double) { return vol; },
                     [](double) { return 0.2; }, 1.0, ""};
    auto const tr = solve_diffusion(path, gbm);
    auto const d = derivative_diffusion_D0(path, tr, gbm);
    auto const dc = derivative_diffusion_D0_closed(path, tr, gbm);
    double const dt = 1.0 / 512;
    double worst = 0.0;
    double worst_closed = 0.0;
    // D_t Z_T = σ Z_T for t after the last jump; before it the jump adds a
    // constant that the variational equation does not scale.
    double const last = path.jumps().empty() ? 0.0 : path.jumps().back().time;
    for (std::size_t i = 0; i < 512; ++i) {
        double const t = i * dt;
        if (t <= last) {
            continue;
        }
        worst = std::max(worst, std::abs(d.continuous()[i] / (vol * tr.terminal()) - 1.0));
        worst_closed = std::max(worst_closed, std::abs(dc.continuous()[i] / d.continuous()[i] - 1.0));
    }
    CHECK(worst < 5 * vol * std::sqrt(dt) + mu * dt);
    CHECK(worst_closed < 0.05);
}

TEST_CASE("first time the diffusion coefficient is nonzero")
{
    auto const trip = discrete({}, 2.0, 1.0);
    auto const path = LevyPath::from_jumps(trip, {}, 64);
    auto const sde = [](RealFn sigma) {
        return DiffusionSDE{[](double) { return 1.0; }, [](double) { return 0.0; }, std::move(sigma),
                            [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, ""};
    };
    auto const s1 = sde([](double) { return 1.0; });
    CHECK(stopping_time_S(solve_diffusion(path, s1), s1) == 0.0);
    auto const s0 = sde([](double) { return 0.0; });
    CHECK(stopping_time_S(solve_diffusion(path, s0), s0) == 2.0);
    // Z_t = t, σ(z) = (z − 1)⁺: first grid node with Z > 1
    auto const sh = sde([](double z) { return std::max(0.0, z - 1.0); });
    auto const tr = solve_diffusion(path, sh);
    std::size_t first = 0;
    while (!(tr.values[first] > 1.0)) {
        ++first;
    }
    CHECK(stopping_time_S(tr, sh) == doctest::Approx(2.0 * first / 64.0));
    CHECK(first == 33);
}

#include "lmc/experiments.hpp"

#include "lmc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lmc {

namespace {

Flow flow_for(RealFn const& f, RealFn const& df, double horizon, double ode_step)
{
    return ode_step > 0.0 ? Flow(f, df, ode_step) : make_flow(f, df, horizon);
}

} // namespace

MonotoneDriftReport monotone_drift_experiment(AdditiveJumpSDE const& sde, Monotone direction,
                                              std::shared_ptr<LevyTriplet const> triplet, MCConfig const& mc,
                                              double tau, double ode_step)
{
    auto const k = monotone_weight(sde.h, direction);
    Flow const flow = flow_for(sde.f, sde.df, triplet->horizon, ode_step);
    struct Out
    {
        PathRow row;
        bool coefs_positive = true;
    };
    auto const outs = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        std::uint64_t const seed = path_seed(mc.base_seed, i);
        auto const path = simulate_path(triplet, mc.grid_size, seed);
        auto const traj = solve_additive_jump(path, sde, flow);
        Out o;
        o.row.seed = seed;
        o.row.n_jumps = traj.n_jumps();
        o.row.z_T = traj.terminal;
        if (traj.n_jumps() > 0) {
            auto const D = derivative_additive(traj, sde, k);
            auto const crit = abs_continuity_indicator(D, tau);
            o.row.norm_sq = crit.l2;
            o.row.indicator = crit.positive;
            for (auto const& s : D.steps()) {
                o.coefs_positive = o.coefs_positive && s.coef > 0.0;
            }
        }
        return o;
    });
    MonotoneDriftReport r;
    r.n_paths = mc.n_paths;
    r.min_norm = std::numeric_limits<double>::infinity();
    for (auto const& o : outs) {
        r.rows.push_back(o.row);
        if (o.row.n_jumps == 0) {
            continue;
        }
        ++r.n_with_jump;
        r.n_positive += o.row.indicator ? 1 : 0;
        r.min_norm = std::min(r.min_norm, o.row.norm_sq);
        r.coefficients_positive = r.coefficients_positive && o.coefs_positive;
    }
    r.fraction_positive = r.n_with_jump ? static_cast<double>(r.n_positive) / static_cast<double>(r.n_with_jump)
                                        : 0.0;
    if (r.n_with_jump == 0) {
        r.min_norm = 0.0;
    }
    return r;
}

double markov_bound(LevyMeasure const& nu, RealFn const& h, double radius, double lipschitz, double horizon,
                    double t)
{
    double const h2 = nu.integrate([&](double y) { return h(y) * h(y); });
    double const h1 = nu.integrate([&](double y) { return std::abs(h(y)); });
    return 8.0 * std::exp(2.0 * lipschitz * horizon) / (radius * radius) * t * (h2 + horizon * h1 * h1);
}

LocalMonotoneReport local_monotone_experiment(AdditiveJumpSDE const& sde, LevyMeasure const& full,
                                              std::shared_ptr<LevyTriplet const> triplet, double radius,
                                              double lipschitz, std::vector<double> const& t_grid,
                                              MCConfig const& mc, double tau, double ode_step)
{
    double const T = triplet->horizon;
    Flow const flow = flow_for(sde.f, sde.df, T, ode_step);
    double const amplification = std::exp(lipschitz * T);
    std::vector<WeightK> weights;
    for (double t : t_grid) {
        weights.push_back(local_monotone_weight(sde.h, t, T));
    }
    struct Flags
    {
        std::vector<char> in_A;
        std::vector<char> has_jump_before;
        std::vector<char> positive;
    };
    auto const flags = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
        auto const traj = solve_additive_jump(path, sde, flow);
        Flags f;
        for (std::size_t q = 0; q < t_grid.size(); ++q) {
            double const t = t_grid[q];
            double sum = 0.0;
            bool before = false;
            for (auto const& j : path.jumps()) {
                if (j.time <= t) {
                    sum += std::abs(sde.h(j.size));
                }
                before = before || j.time < t;
            }
            bool const in_A = amplification * sum > 0.5 * radius;
            f.in_A.push_back(in_A);
            f.has_jump_before.push_back(before);
            bool positive = false;
            if (!in_A && before) {
                positive = abs_continuity_indicator(derivative_additive(traj, sde, weights[q]), tau).positive;
            }
            f.positive.push_back(positive);
        }
        return f;
    });
    LocalMonotoneReport r;
    r.epsilon = triplet->truncation.value_or(0.0);
    r.radius = radius;
    r.lipschitz = lipschitz;
    for (std::size_t q = 0; q < t_grid.size(); ++q) {
        LocalMonotoneRow row;
        row.t = t_grid[q];
        std::vector<double> ind(flags.size());
        for (std::size_t i = 0; i < flags.size(); ++i) {
            ind[i] = flags[i].in_A[q] ? 1.0 : 0.0;
            if (!flags[i].in_A[q]) {
                ++row.n_complement;
                if (flags[i].has_jump_before[q]) {
                    ++row.n_complement_with_jump;
                    row.n_positive += flags[i].positive[q] ? 1 : 0;
                }
            }
        }
        auto const st = sample_stats(ind);
        row.p_hat = st.mean;
        row.p_stderr = st.std_error;
        row.bound = markov_bound(full, sde.h, radius, lipschitz, T, row.t);
        r.rows.push_back(row);
    }
    return r;
}

WronskianReport wronskian_experiment(MultiplicativeJumpSDE const& sde, std::shared_ptr<LevyTriplet const> triplet,
                                     MCConfig const& mc, double tau, double ode_step)
{
    double const T = triplet->horizon;
    Flow const flow = flow_for(sde.f, sde.df, T, ode_step);
    struct Out
    {
        PathRow row;
        bool single = false;
        double formula_error = 0.0;
    };
    auto const outs = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        std::uint64_t const seed = path_seed(mc.base_seed, i);
        auto const path = simulate_path(triplet, mc.grid_size, seed);
        auto const traj = solve_multiplicative(path, sde, flow);
        Out o;
        o.row.seed = seed;
        o.row.n_jumps = traj.n_jumps();
        o.row.z_T = traj.terminal;
        std::size_t const n = traj.n_jumps();
        if (n == 0) {
            return o;
        }
        double const prev = n >= 2 ? traj.jumps[n - 2].time : 0.0;
        double const p = 0.5 * (prev + traj.jumps[n - 1].time);
        auto const k = last_jump_weight(p, T);
        auto const D = derivative_multiplicative(traj, sde, k);
        auto const steps = D.steps();
        o.single = steps.size() == n;
        for (std::size_t j = 0; j + 1 < steps.size(); ++j) {
            o.single = o.single && steps[j].coef == 0.0;
        }
        auto const& last = traj.jumps[n - 1];
        double const pre = traj.pre[n - 1];
        double const expected = std::exp(traj.segment_log[n]) * k.k(last.time, last.size)
                                * (sde.f(pre) - sde.f(traj.post[n - 1]) + sde.f(pre) * sde.h(last.size) * sde.dg(pre));
        double const got = steps.empty() ? 0.0 : steps.back().coef;
        o.formula_error = std::abs(got - expected) / std::max(std::abs(expected), 1e-300);
        auto const crit = abs_continuity_indicator(D, tau);
        o.row.norm_sq = crit.l2;
        o.row.indicator = crit.positive;
        return o;
    });
    WronskianReport r;
    r.condition_holds = wronskian_condition(sde, triplet->nu);
    r.n_paths = mc.n_paths;
    for (auto const& o : outs) {
        r.rows.push_back(o.row);
        if (o.row.n_jumps == 0) {
            ++r.n_excluded;
            continue;
        }
        r.n_single_term += o.single ? 1 : 0;
        r.n_positive += o.row.indicator ? 1 : 0;
        r.max_formula_error = std::max(r.max_formula_error, o.formula_error);
    }
    return r;
}

DensityReport density_from_samples(std::vector<double> samples, std::size_t n_paths, std::size_t bins)
{
    DensityReport r;
    r.n_paths = n_paths;
    r.n_conditioned = samples.size();
    if (samples.empty()) {
        return r;
    }
    r.empty = false;
    std::sort(samples.begin(), samples.end());
    std::size_t best = 1;
    std::size_t run = 1;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        run = samples[i] == samples[i - 1] ? run + 1 : 1;
        best = std::max(best, run);
    }
    r.atom_statistic = static_cast<double>(best) / static_cast<double>(samples.size());

    bins = std::max<std::size_t>(bins, 1);
    r.histogram.lo = samples.front();
    r.histogram.hi = samples.back() > samples.front() ? samples.back() : samples.front() + 1.0;
    r.histogram.counts.assign(bins, 0);
    double const width = (r.histogram.hi - r.histogram.lo) / static_cast<double>(bins);
    for (double v : samples) {
        auto b = static_cast<std::size_t>((v - r.histogram.lo) / width);
        ++r.histogram.counts[std::min(b, bins - 1)];
    }

    auto const st = sample_stats(samples);
    double const sd = std::sqrt(st.variance);
    if (sd > 0.0) {
        double const bw = 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
        r.kde_bandwidth = bw;
        constexpr std::size_t points = 128;
        double const lo = samples.front() - 3.0 * bw;
        double const hi = samples.back() + 3.0 * bw;
        double const norm = 1.0 / (static_cast<double>(samples.size()) * bw * std::sqrt(2.0 * M_PI));
        for (std::size_t q = 0; q < points; ++q) {
            double const x = lo + (hi - lo) * static_cast<double>(q) / (points - 1.0);
            // Only samples within 8 bandwidths contribute noticeably.
            auto const first = std::lower_bound(samples.begin(), samples.end(), x - 8.0 * bw);
            auto const last = std::upper_bound(samples.begin(), samples.end(), x + 8.0 * bw);
            double acc = 0.0;
            for (auto it = first; it != last; ++it) {
                double const u = (x - *it) / bw;
                acc += std::exp(-0.5 * u * u);
            }
            r.kde_x.push_back(x);
            r.kde_y.push_back(acc * norm);
        }
    }
    return r;
}

DensityReport density_experiment(AnySDE const& sde, std::shared_ptr<LevyTriplet const> triplet, MCConfig const& mc,
                                 Conditioning conditioning, std::size_t bins,
                                 double ode_step)
{
    double const T = triplet->horizon;
    std::optional<Flow> flow;
    if (sde.kind == SdeKind::additive) {
        flow.emplace(flow_for(sde.additive.f, sde.additive.df, T, ode_step));
    } else if (sde.kind == SdeKind::multiplicative) {
        flow.emplace(flow_for(sde.multiplicative.f, sde.multiplicative.df, T, ode_step));
    }
    struct Out
    {
        double z = 0.0;
        bool keep = false;
    };
    auto const outs = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
        std::size_t const n = path.jumps().size();
        Out o;
        double S = 0.0;
        switch (sde.kind) {
        case SdeKind::additive:
            o.z = solve_additive_jump(path, sde.additive, *flow).terminal;
            break;
        case SdeKind::multiplicative:
            o.z = solve_multiplicative(path, sde.multiplicative, *flow).terminal;
            break;
        case SdeKind::diffusion: {
            auto const traj = solve_diffusion(path, sde.diffusion);
            o.z = traj.terminal();
            S = stopping_time_S(traj, sde.diffusion);
            break;
        }
        }
        switch (conditioning) {
        case Conditioning::all:
            o.keep = true;
            break;
        case Conditioning::no_jumps:
            o.keep = n == 0;
            break;
        case Conditioning::at_least_one_jump:
            o.keep = n >= 1;
            break;
        case Conditioning::s_before_T:
            if (sde.kind != SdeKind::diffusion) {
                throw std::invalid_argument("conditioning on {S < T} needs the diffusion equation");
            }
            o.keep = S < T;
            break;
        }
        return o;
    });
    std::vector<double> kept;
    for (auto const& o : outs) {
        if (o.keep) {
            kept.push_back(o.z);
        }
    }
    return density_from_samples(std::move(kept), mc.n_paths, bins);
}

TruncationReport truncation_convergence_report(AdditiveJumpSDE const& sde, LevyTriplet const& infinite,
                                               std::vector<double> const& levels, double reference_epsilon,
                                               MCConfig const& mc, double ode_step)
{
    if (levels.empty()) {
        throw std::invalid_argument("truncation_convergence_report: no levels given");
    }
    for (double m : levels) {
        if (!(1.0 / m >= reference_epsilon)) {
            throw std::invalid_argument("truncation level 1/m falls below the reference truncation");
        }
    }
    auto const triplet = std::make_shared<LevyTriplet const>(infinite.truncated(reference_epsilon));
    Flow const flow = flow_for(sde.f, sde.df, triplet->horizon, ode_step);
    std::vector<JumpSet> sets;
    for (double m : levels) {
        sets.push_back(JumpSet::symmetric_band(1.0 / m, m));
    }
    auto const sq = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
        double const ref = solve_additive_jump(path, sde, flow).terminal;
        std::vector<double> out;
        for (auto const& theta : sets) {
            double const z = solve_additive_jump(restrict_jumps(path, theta), sde, flow).terminal;
            out.push_back((z - ref) * (z - ref));
        }
        return out;
    });
    TruncationReport r;
    r.reference_epsilon = reference_epsilon;
    r.separated_decrease = true;
    for (std::size_t q = 0; q < levels.size(); ++q) {
        std::vector<double> col(sq.size());
        for (std::size_t i = 0; i < sq.size(); ++i) {
            col[i] = sq[i][q];
        }
        auto const st = sample_stats(col);
        TruncationRow row;
        row.level = levels[q];
        row.mean_sq = st.mean;
        row.std_error = st.std_error;
        if (q + 1 < levels.size()) {
            std::vector<double> diff(sq.size());
            for (std::size_t i = 0; i < sq.size(); ++i) {
                diff[i] = sq[i][q] - sq[i][q + 1];
            }
            auto const sd = sample_stats(diff);
            row.drop = sd.mean;
            row.drop_stderr = sd.std_error;
            r.separated_decrease = r.separated_decrease && sd.mean > 3.0 * sd.std_error && sd.mean > 0.0;
        }
        r.rows.push_back(row);
    }
    return r;
}

MomentBoundReport moment_bound_check(MCConfig const& mc, std::shared_ptr<LevyTriplet const> triplet,
                                     JumpSet const& theta, SimplexIntegrand const& phi, double p)
{
    MomentBoundReport r;
    r.n = phi.arity;
    r.p = p;
    r.lambda = triplet->horizon * triplet->nu.mass(theta);
    auto const values = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
        auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
        return std::pow(std::abs(multiple_integral(path, theta, phi)), p);
    });
    auto const st = sample_stats(values);
    r.lhs = st.mean;
    r.lhs_stderr = st.std_error;
    r.lp_integral = simplex_lp_integral(*triplet, theta, phi, p).value;
    r.constant_published = moment_constant(r.n, p, r.lambda, MomentConstant::published);
    r.constant_binomial = moment_constant(r.n, p, r.lambda, MomentConstant::binomial);
    r.rhs_published = r.constant_published * r.lp_integral;
    r.rhs_binomial = r.constant_binomial * r.lp_integral;
    r.holds_published = r.lhs - 3.0 * r.lhs_stderr <= r.rhs_published;
    r.holds_binomial = r.lhs - 3.0 * r.lhs_stderr <= r.rhs_binomial;
    return r;
}

} // namespace lmc

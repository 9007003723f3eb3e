#include "lmc/harness.hpp"

#include "lmc/presets.hpp"
#include "lmc/quadrature.hpp"
#include "lmc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#ifndef LMC_VERSION
#define LMC_VERSION "0.0.0"
#endif

namespace lmc {

std::string library_version()
{
    return LMC_VERSION;
}

namespace {

std::vector<std::pair<ExperimentKind, std::string>> const& kind_names()
{
    static std::vector<std::pair<ExperimentKind, std::string>> const names{
        {ExperimentKind::duality, "duality"},
        {ExperimentKind::product_formula, "product-formula"},
        {ExperimentKind::fubini, "fubini"},
        {ExperimentKind::derivative_check, "derivative-check"},
        {ExperimentKind::monotone_drift, "monotone-drift"},
        {ExperimentKind::local_monotone, "local-monotone"},
        {ExperimentKind::wronskian, "wronskian"},
        {ExperimentKind::density, "density"},
        {ExperimentKind::moment_bound, "moment-bound"},
        {ExperimentKind::truncation, "truncation"},
    };
    return names;
}

using Plan = std::function<void(RunReport&)>;

std::shared_ptr<LevyTriplet const> simulation_triplet(Config const& cfg)
{
    auto t = make_triplet(cfg);
    auto const eps = cfg.get_optional_double("triplet.truncation");
    if (t.nu.finite()) {
        if (eps) {
            throw ConfigError("triplet.truncation", "only meaningful for an infinite-activity measure");
        }
        return std::make_shared<LevyTriplet const>(std::move(t));
    }
    if (!eps) {
        throw ConfigError("triplet.truncation", "required for an infinite-activity measure");
    }
    if (!(*eps > 0.0)) {
        throw ConfigError("triplet.truncation", "must be positive");
    }
    return std::make_shared<LevyTriplet const>(t.truncated(*eps));
}

std::size_t to_count(double v, std::string const& field)
{
    if (!(v >= 1.0) || v != std::floor(v) || v > 64.0) {
        throw ConfigError(field, "expected integers between 1 and 64");
    }
    return static_cast<std::size_t>(v);
}

MCConfig mc_with(ExperimentConfig const& ec)
{
    MCConfig mc = ec.mc;
    mc.grid_size = ec.numeric.grid_size;
    return mc;
}

void require_kind(SdePreset const& s, SdeKind kind, std::string const& what)
{
    if (s.sde.kind != kind) {
        throw ConfigError("sde", "this experiment needs " + what + " equation preset");
    }
}

double count_required(RunReport const& r)
{
    return static_cast<double>(std::count_if(r.checks.begin(), r.checks.end(),
                                             [](Check const& c) { return c.required && !c.pass; }));
}

//---------------------------------------------------------------------------//
// Plans
//---------------------------------------------------------------------------//

Plan plan_duality(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const name = cfg.get_string("duality.preset", "all");
    std::vector<DualityPreset> presets;
    if (name == "all") {
        for (auto const& n : duality_preset_names()) {
            presets.push_back(make_duality_preset(n));
        }
    } else if (name == "custom") {
        presets.push_back(make_custom_duality(cfg));
    } else {
        presets.push_back(make_duality_preset(name));
    }
    for (auto const& p : presets) {
        try {
            validate_functional(p.F, *p.triplet);
            if (p.G) {
                validate_functional(*p.G, *p.triplet);
            }
            validate_weight(p.k, *p.triplet);
        } catch (std::invalid_argument const& e) {
            throw ConfigError("duality.preset", p.name + ": " + e.what());
        }
    }
    bool const product = cfg.get_bool("duality.product", true);
    double const z_max = cfg.get_double("check.z_max", 3.0);
    auto const default_min = presets.size() > 1 ? presets.size() - 1 : presets.size();
    auto const min_passing = cfg.get_uint("check.min_passing", default_min);
    auto const mc = mc_with(ec);
    return [=](RunReport& r) {
        Table t{"duality", {"lhs", "rhs", "stderr_diff", "z_score", "degenerate"}, {}, {}};
        std::size_t passing = 0;
        auto record = [&](std::string const& label, DualityReport const& d) {
            t.labels.push_back(label);
            t.rows.push_back({d.lhs, d.rhs, d.stderr_diff, d.z_score, d.degenerate ? 1.0 : 0.0});
            r.add(make_check("z_score[" + label + "]", d.z_score, Relation::le, z_max, false));
            passing += d.z_score <= z_max ? 1 : 0;
        };
        for (auto const& p : presets) {
            record(p.name, duality_residual(mc, p.triplet, p.F, p.g, p.lambda, p.k));
        }
        std::size_t prod_passing = 0;
        std::size_t prod_total = 0;
        if (product) {
            for (auto const& p : presets) {
                if (p.G) {
                    auto const d = product_duality_residual(mc, p.triplet, p.F, *p.G, p.g, p.lambda, p.k);
                    std::size_t const before = passing;
                    record(p.name + "/product", d);
                    prod_passing += passing - before;
                    ++prod_total;
                }
            }
        }
        std::size_t const base_passing = passing - prod_passing;
        r.metric("presets", static_cast<double>(presets.size()));
        r.metric("presets_within_z", static_cast<double>(base_passing));
        r.metric("product_within_z", static_cast<double>(prod_passing));
        r.add(make_check("presets_within_z", static_cast<double>(base_passing), Relation::ge,
                         static_cast<double>(min_passing)));
        if (prod_total > 0) {
            r.add(make_check("product_presets_within_z", static_cast<double>(prod_passing), Relation::ge,
                             static_cast<double>(prod_total)));
        }
        r.tables.push_back(std::move(t));
    };
}

Plan plan_product_formula(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const triplet = simulation_triplet(cfg);
    auto const theta = make_jump_set(cfg, "product.theta");
    auto const phi1 = first_order(make_kernel(cfg, "product.phi1", "exp-decay"));
    std::vector<SimplexIntegrand> phis;
    for (double n : cfg.get_doubles("product.orders", {1, 2, 3, 4})) {
        phis.push_back(make_integrand(cfg, "product.phi_n", to_count(n, "product.orders"), "ordered-poly"));
    }
    double const tol = cfg.get_double("check.max_relative", 1e-10);
    auto const mc = mc_with(ec);
    return [=](RunReport& r) {
        auto const per_path = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
            auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
            std::vector<double> rel;
            for (auto const& phi : phis) {
                rel.push_back(product_identity_residual(path, theta, phi, phi1).relative());
            }
            rel.push_back(static_cast<double>(count_jumps(path, theta)));
            return rel;
        });
        Table t{"product_formula", {"n", "max_relative_residual"}, {}, {}};
        double worst = 0.0;
        for (std::size_t q = 0; q < phis.size(); ++q) {
            double m = 0.0;
            for (auto const& v : per_path) {
                m = std::max(m, v[q]);
            }
            worst = std::max(worst, m);
            t.rows.push_back({static_cast<double>(phis[q].arity), m});
        }
        std::vector<double> counts;
        for (auto const& v : per_path) {
            counts.push_back(v.back());
        }
        r.metric("mean_theta_jumps", sample_stats(counts).mean);
        r.metric("expected_theta_jumps", triplet->horizon * triplet->nu.mass(theta));
        r.add(make_check("max_relative_residual", worst, Relation::le, tol));
        r.tables.push_back(std::move(t));
    };
}

Plan plan_fubini(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const triplet = simulation_triplet(cfg);
    auto const family = cfg.get_string("fubini.family", "mixed");
    ParamKernelFn f;
    if (family == "mixed") {
        f = [](double u, double t, double x) { return std::cos(u * t) + u * x * std::exp(-x * x); };
    } else if (family == "separable") {
        f = [](double u, double t, double x) { return std::exp(-u) * std::sin(t) / (1.0 + x * x); };
    } else {
        throw ConfigError("fubini.family", "expected mixed or separable, got '" + family + "'");
    }
    double const tol = cfg.get_double("check.max_relative", 1e-9);
    auto const mc = mc_with(ec);
    return [=](RunReport& r) {
        auto const rel = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
            auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
            return fubini_residual(path, f).relative();
        });
        double const worst = rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end());
        r.add(make_check("max_relative_residual", worst, Relation::le, tol));
    };
}

Plan plan_derivative_check(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const triplet = simulation_triplet(cfg);
    auto const part = cfg.get_string("derivative.check", "all");
    static std::vector<std::string> const parts{"all", "finite-difference", "alternative", "orthogonality",
                                                "inner-products", "zero-derivative"};
    if (std::find(parts.begin(), parts.end(), part) == parts.end()) {
        throw ConfigError("derivative.check", "unknown check '" + part + "'");
    }
    auto const wants = [part](std::string const& p) { return part == "all" || part == p; };
    auto const theta = make_jump_set(cfg, "derivative.theta");
    auto const lambda = make_lambda(cfg, "derivative.lambda");
    auto const k = make_weight(cfg, "derivative.k");
    auto const arity = to_count(cfg.get_double("derivative.arity", 2.0), "derivative.arity");
    auto const phi = make_integrand(cfg, "derivative.integrand", arity, "ordered-poly");
    Kernel h = make_kernel(cfg, "derivative.kernel");
    auto const samples = cfg.get_uint("derivative.samples", 200);
    auto const alt_paths = cfg.get_uint("derivative.alt_paths", 100);
    double const tol_fd = cfg.get_double("check.fd_relative", 1e-6);
    double const tol_alt = cfg.get_double("check.alt_deviation", 1e-8);
    double const tol_orth = cfg.get_double("check.orthogonality", 1e-12);
    double const tol_inner = cfg.get_double("check.inner_product", 1e-10);
    if (!theta.subset_of(lambda.jumps)) {
        throw ConfigError("derivative.theta", "Θ must be contained in Λ");
    }
    try {
        validate_weight(k, *triplet);
        validate_kernel(h, *triplet);
    } catch (std::invalid_argument const& e) {
        throw ConfigError("derivative", e.what());
    }
    double const eps = ec.numeric.fd_epsilon;
    auto const mc = mc_with(ec);

    return [=](RunReport& r) {
        double const T = triplet->horizon;
        double orth_worst = 0.0;
        bool orth_any = false;
        auto orth = [&](DerivativeProcess const& d) {
            auto const o = orthogonality_residual(d);
            if (!o.applicable) {
                return;
            }
            orth_any = true;
            double const v = o.scale > 0.0 ? o.residual / o.scale : (o.residual > 0.0 ? 1.0 : 0.0);
            orth_worst = std::max(orth_worst, v);
        };

        if (wants("finite-difference") || wants("orthogonality")) {
            SimplexIntegrand first_time;
            first_time.arity = 1;
            first_time.off_simplex = OffSimplex::native;
            first_time.eval = [](Tuple z) { return z[0].time; };
            first_time.dt_eval = [](Tuple, std::size_t) { return 1.0; };
            first_time.name = "first-time";

            struct Sample
            {
                bool used = false;
                double rel = 0.0;
                bool t1_exact = true;
                std::vector<DerivativeProcess> processes;
            };
            std::size_t const attempts = samples * 50 + 100;
            std::size_t used = 0;
            double fd_worst = 0.0;
            std::size_t t1_mismatch = 0;
            std::size_t t1_checked = 0;
            // Paths are drawn in blocks so the sample is deterministic.
            for (std::size_t start = 0; used < samples && start < attempts; start += samples) {
                auto const block = parallel_map(samples, mc.threads, [&](std::size_t j) {
                    std::uint64_t const seed = path_seed(mc.base_seed, start + j);
                    auto const path = simulate_path(triplet, mc.grid_size, seed);
                    Sample s;
                    if (count_jumps(path, theta) < arity) {
                        return s;
                    }
                    StreamRng aux(seed, Stream::auxiliary);
                    double const t = T * aux.uniform_open();
                    s.used = true;
                    auto const fd = finite_difference_check(path, theta, lambda, k, phi, t, eps);
                    s.rel = std::abs(fd.analytic - fd.numeric) / std::max(std::abs(fd.analytic), 1e-6);
                    auto const dj = derivative_Jn(path, theta, lambda, k, phi);
                    auto const fdj = finite_difference_path(
                        path, lambda, k, [&](LevyPath const& p) { return multiple_integral(p, theta, phi); }, dj, t,
                        eps);
                    s.rel = std::max(s.rel, std::abs(fdj.analytic - fdj.numeric) / std::max(std::abs(fdj.analytic), 1e-6));
                    auto const d1 = derivative_jump_functional(path, theta, lambda, k, first_time);
                    auto const first = theta_jumps(path, theta).front();
                    double const closed = k.k(first.time, first.size) * (first.time / T - (t <= first.time ? 1.0 : 0.0));
                    s.t1_exact = d1.at(t) == closed;
                    s.processes.push_back(derivative_jump_functional(path, theta, lambda, k, phi));
                    s.processes.push_back(dj);
                    s.processes.push_back(d1);
                    return s;
                });
                for (auto const& s : block) {
                    if (!s.used || used >= samples) {
                        continue;
                    }
                    ++used;
                    fd_worst = std::max(fd_worst, s.rel);
                    ++t1_checked;
                    t1_mismatch += s.t1_exact ? 0 : 1;
                    for (auto const& d : s.processes) {
                        orth(d);
                    }
                }
            }
            if (wants("finite-difference")) {
                r.metric("fd_samples", static_cast<double>(used));
                r.add(make_check("fd_samples", static_cast<double>(used), Relation::ge, static_cast<double>(samples)));
                r.add(make_check("fd_max_relative_error", fd_worst, Relation::le, tol_fd));
                r.metric("first_jump_time_checked", static_cast<double>(t1_checked));
                r.add(make_check("first_jump_time_mismatches", static_cast<double>(t1_mismatch), Relation::eq, 0.0));
            }
        }

        if (wants("alternative") || wants("orthogonality")) {
            auto const pre = alt_deterministic_part(h, lambda, k, *triplet, mc.grid_size);
            auto const devs = parallel_map(alt_paths, mc.threads, [&](std::size_t i) {
                auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
                auto const d1 = derivative_M(path, h, lambda, k);
                auto const d2 = derivative_M_alt(path, h, lambda, k, pre);
                double sup = 0.0;
                double dev = 0.0;
                std::size_t const G = mc.grid_size;
                for (std::size_t q = 0; q <= 2 * G; ++q) {
                    double const t = T * static_cast<double>(q) / static_cast<double>(2 * G);
                    sup = std::max(sup, std::abs(d1.at(t)));
                    dev = std::max(dev, std::abs(d1.at(t) - d2.at(t)));
                }
                auto const o = orthogonality_residual(d1);
                return std::array<double, 3>{dev / (1.0 + sup), o.residual, o.applicable ? o.scale : -1.0};
            });
            double worst = 0.0;
            for (auto const& [dev, residual, scale] : devs) {
                worst = std::max(worst, dev);
                if (scale >= 0.0) {
                    orth_any = true;
                    orth_worst = std::max(orth_worst, scale > 0.0 ? residual / scale : (residual > 0.0 ? 1.0 : 0.0));
                }
            }
            if (wants("alternative")) {
                r.metric("alt_paths", static_cast<double>(alt_paths));
                r.add(make_check("alt_max_deviation", worst, Relation::le, tol_alt));
            }
        }

        if (wants("orthogonality")) {
            r.metric("orthogonality_applicable", orth_any ? 1.0 : 0.0);
            r.add(make_check("orthogonality_max_ratio", orth_worst, Relation::le, tol_orth));
        }

        if (wants("inner-products")) {
            double worst = 0.0;
            std::size_t const m = 12;
            for (std::size_t a = 1; a < m; ++a) {
                for (std::size_t b = a; b < m; ++b) {
                    double const s = T * static_cast<double>(a) / m;
                    double const u = T * static_cast<double>(b) / m + (b > a ? 0.013 * T : 0.0);
                    auto piece = [&](double t) {
                        return (s / T - (t <= s ? 1.0 : 0.0)) * (u / T - (t <= u ? 1.0 : 0.0));
                    };
                    double const lo = std::min(s, u);
                    double const hi = std::max(s, u);
                    double const quad = quad::integrate(piece, 0.0, lo) + quad::integrate(piece, lo, hi)
                                        + quad::integrate(piece, hi, T);
                    worst = std::max(worst, std::abs(quad - step_inner(s, u, T)));
                }
            }
            r.add(make_check("inner_product_max_error", worst, Relation::le, tol_inner));
        }

        if (wants("zero-derivative")) {
            auto const count = count_kernel(theta);
            auto F1 = scalar_functional([](double u) { return std::tanh(u); },
                                        [](double u) { return 1.0 / (std::cosh(u) * std::cosh(u)); }, count, "tanh");
            // Smoothed indicator of {N_T^Θ ≥ 1}.
            double const shift = triplet->horizon * triplet->nu.mass(theta);
            auto F2 = scalar_functional(
                [shift](double u) { return 1.0 / (1.0 + std::exp(-40.0 * (u + shift - 0.5))); },
                [shift](double u) {
                    double const e = std::exp(-40.0 * (u + shift - 0.5));
                    return 40.0 * e / ((1.0 + e) * (1.0 + e));
                },
                count, "indicator");
            auto const nonzero = parallel_map(mc.n_paths, mc.threads, [&](std::size_t i) {
                auto const path = simulate_path(triplet, mc.grid_size, path_seed(mc.base_seed, i));
                std::size_t bad = 0;
                for (auto const* F : {&F1, &F2}) {
                    auto const d = derivative_smooth(path, *F, lambda, k);
                    bool zero = true;
                    for (auto const& s : d.steps()) {
                        zero = zero && s.coef == 0.0;
                    }
                    for (double v : d.continuous()) {
                        zero = zero && v == 0.0;
                    }
                    bad += zero ? 0 : 1;
                }
                return bad;
            });
            double total = 0.0;
            for (auto b : nonzero) {
                total += static_cast<double>(b);
            }
            r.metric("zero_derivative_paths", static_cast<double>(mc.n_paths));
            r.add(make_check("nonzero_derivatives", total, Relation::eq, 0.0));
        }
    };
}

Plan plan_monotone_drift(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const sde = make_sde(cfg, "sde", "increasing-drift");
    require_kind(sde, SdeKind::additive, "an additive");
    auto const triplet = simulation_triplet(cfg);
    if (triplet->truncation) {
        throw ConfigError("triplet.nu", "the monotone-drift experiment needs a finite measure");
    }
    auto const mc = mc_with(ec);
    auto const numeric = ec.numeric;
    return [=](RunReport& r) {
        auto rep = monotone_drift_experiment(sde.sde.additive, sde.direction, triplet, mc, numeric.criterion_tol,
                                             numeric.ode_step);
        r.metric("n_paths", static_cast<double>(rep.n_paths));
        r.metric("n_with_jump", static_cast<double>(rep.n_with_jump));
        r.metric("n_positive", static_cast<double>(rep.n_positive));
        r.metric("min_norm_sq", rep.min_norm);
        r.add(make_check("paths_with_jump", static_cast<double>(rep.n_with_jump), Relation::ge, 1.0));
        r.add(make_check("fraction_positive", rep.fraction_positive, Relation::eq, 1.0));
        r.add(make_check("coefficients_positive", rep.coefficients_positive ? 1.0 : 0.0, Relation::eq, 1.0));
        r.rows = std::move(rep.rows);
    };
}

Plan plan_local_monotone(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const sde = make_sde(cfg, "sde", "local-hump");
    require_kind(sde, SdeKind::additive, "an additive");
    auto const full = make_triplet(cfg);
    auto const triplet = simulation_triplet(cfg);
    double const radius = cfg.get_double("local.radius", sde.radius);
    double const lipschitz = cfg.get_double("local.lipschitz", sde.lipschitz);
    if (!(radius > 0.0)) {
        throw ConfigError("local.radius", "must be positive");
    }
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) {
        grid.push_back(0.002 * i * full.horizon);
    }
    grid = cfg.get_doubles("local.t_grid", grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] <= full.horizon) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ConfigError("local.t_grid", "times must increase strictly within (0, T]");
        }
    }
    double const slack = cfg.get_double("check.stderr_slack", 3.0);
    auto const mc = mc_with(ec);
    auto const numeric = ec.numeric;
    return [=](RunReport& r) {
        auto const rep = local_monotone_experiment(sde.sde.additive, full.nu, triplet, radius, lipschitz, grid, mc,
                                                   numeric.criterion_tol, numeric.ode_step);
        Table t{"local_monotone",
                {"t", "p_hat", "p_stderr", "bound", "n_complement", "n_complement_with_jump", "n_positive"},
                {},
                {}};
        std::size_t bound_violations = 0;
        std::size_t not_monotone = 0;
        std::size_t criterion_failures = 0;
        std::size_t tested = 0;
        for (std::size_t q = 0; q < rep.rows.size(); ++q) {
            auto const& row = rep.rows[q];
            t.rows.push_back({row.t, row.p_hat, row.p_stderr, row.bound, static_cast<double>(row.n_complement),
                              static_cast<double>(row.n_complement_with_jump), static_cast<double>(row.n_positive)});
            bound_violations += row.p_hat > row.bound + slack * row.p_stderr ? 1 : 0;
            not_monotone += q > 0 && !(row.bound > rep.rows[q - 1].bound) ? 1 : 0;
            criterion_failures += row.n_complement_with_jump - row.n_positive;
            tested += row.n_complement_with_jump;
        }
        r.metric("truncation_epsilon", rep.epsilon);
        r.metric("complement_paths_tested", static_cast<double>(tested));
        r.add(make_check("bound_violations", static_cast<double>(bound_violations), Relation::eq, 0.0));
        r.add(make_check("bound_not_increasing_in_t", static_cast<double>(not_monotone), Relation::eq, 0.0));
        r.add(make_check("criterion_failures_on_complement", static_cast<double>(criterion_failures), Relation::eq,
                         0.0));
        r.add(make_check("complement_paths_tested", static_cast<double>(tested), Relation::ge, 1.0, false));
        r.tables.push_back(std::move(t));
    };
}

Plan plan_wronskian(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const sde = make_sde(cfg, "sde", "wronskian-pair");
    require_kind(sde, SdeKind::multiplicative, "a multiplicative");
    auto const triplet = simulation_triplet(cfg);
    if (triplet->truncation) {
        throw ConfigError("triplet.nu", "the Wronskian experiment needs a finite measure");
    }
    double const tol = cfg.get_double("check.formula_relative", 1e-10);
    auto const mc = mc_with(ec);
    auto const numeric = ec.numeric;
    return [=](RunReport& r) {
        auto rep = wronskian_experiment(sde.sde.multiplicative, triplet, mc, numeric.criterion_tol, numeric.ode_step);
        double const with_jump = static_cast<double>(rep.n_paths - rep.n_excluded);
        r.metric("n_paths", static_cast<double>(rep.n_paths));
        r.metric("n_excluded", static_cast<double>(rep.n_excluded));
        r.add(make_check("wronskian_condition", rep.condition_holds ? 1.0 : 0.0, Relation::eq, 1.0));
        r.add(make_check("single_term_paths", static_cast<double>(rep.n_single_term), Relation::eq, with_jump));
        r.add(make_check("positive_paths", static_cast<double>(rep.n_positive), Relation::eq, with_jump));
        r.add(make_check("max_formula_error", rep.max_formula_error, Relation::le, tol));
        r.rows = std::move(rep.rows);
    };
}

Conditioning parse_conditioning(std::string const& s)
{
    if (s == "all") {
        return Conditioning::all;
    }
    if (s == "no-jumps") {
        return Conditioning::no_jumps;
    }
    if (s == "at-least-one-jump") {
        return Conditioning::at_least_one_jump;
    }
    if (s == "s-before-T") {
        return Conditioning::s_before_T;
    }
    throw ConfigError("density.conditioning",
                      "expected all, no-jumps, at-least-one-jump or s-before-T, got '" + s + "'");
}

Plan plan_density(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const sde = make_sde(cfg, "sde", "increasing-drift");
    auto const triplet = simulation_triplet(cfg);
    auto const cond = parse_conditioning(cfg.get_string("density.conditioning", "all"));
    if (cond == Conditioning::s_before_T && sde.sde.kind != SdeKind::diffusion) {
        throw ConfigError("density.conditioning", "s-before-T needs a diffusion preset");
    }
    auto const bins = cfg.get_uint("density.bins", 40);
    if (bins == 0) {
        throw ConfigError("density.bins", "must be positive");
    }
    auto const atom_max = cfg.get_optional_double("check.atom_max");
    auto const atom_min = cfg.get_optional_double("check.atom_min");
    auto const mc = mc_with(ec);
    auto const numeric = ec.numeric;
    return [=](RunReport& r) {
        auto const rep = density_experiment(sde.sde, triplet, mc, cond, bins, numeric.ode_step);
        r.metric("n_paths", static_cast<double>(rep.n_paths));
        r.metric("n_conditioned", static_cast<double>(rep.n_conditioned));
        if (rep.empty) {
            r.failure = "conditioned sample is empty";
            return;
        }
        r.metric("atom_statistic", rep.atom_statistic);
        r.metric("kde_bandwidth", rep.kde_bandwidth);
        if (atom_max) {
            r.add(make_check("atom_statistic", rep.atom_statistic, Relation::le, *atom_max));
        }
        if (atom_min) {
            r.add(make_check("atom_statistic", rep.atom_statistic, Relation::ge, *atom_min));
        }
        Table hist{"histogram", {"lo", "hi", "count"}, {}, {}};
        double const width = (rep.histogram.hi - rep.histogram.lo) / static_cast<double>(rep.histogram.counts.size());
        for (std::size_t b = 0; b < rep.histogram.counts.size(); ++b) {
            double const lo = rep.histogram.lo + width * static_cast<double>(b);
            hist.rows.push_back({lo, lo + width, static_cast<double>(rep.histogram.counts[b])});
        }
        Table kde{"kde", {"x", "density"}, {}, {}};
        for (std::size_t q = 0; q < rep.kde_x.size(); ++q) {
            kde.rows.push_back({rep.kde_x[q], rep.kde_y[q]});
        }
        r.tables.push_back(std::move(hist));
        r.tables.push_back(std::move(kde));
    };
}

Plan plan_moment_bound(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const triplet = simulation_triplet(cfg);
    auto const theta = make_jump_set(cfg, "moment.theta");
    std::vector<std::size_t> orders;
    for (double n : cfg.get_doubles("moment.orders", {1, 2, 3})) {
        orders.push_back(to_count(n, "moment.orders"));
    }
    auto const powers = cfg.get_doubles("moment.powers", {2, 3, 4});
    for (double p : powers) {
        if (!(p >= 1.0)) {
            throw ConfigError("moment.powers", "powers must be at least 1");
        }
    }
    std::vector<SimplexIntegrand> phis;
    for (auto n : orders) {
        phis.push_back(make_integrand(cfg, "moment.integrand", n, "product-constant"));
    }
    auto const which = cfg.get_string("check.constant", "published");
    if (which != "published" && which != "binomial") {
        throw ConfigError("check.constant", "expected published or binomial");
    }
    auto const mc = mc_with(ec);
    return [=](RunReport& r) {
        Table t{"moment_bound",
                {"n", "p", "lambda", "lhs", "lhs_stderr", "lp_integral", "rhs_published", "rhs_binomial"},
                {},
                {}};
        for (auto const& phi : phis) {
            for (double p : powers) {
                auto const m = moment_bound_check(mc, triplet, theta, phi, p);
                t.rows.push_back({static_cast<double>(m.n), p, m.lambda, m.lhs, m.lhs_stderr, m.lp_integral,
                                  m.rhs_published, m.rhs_binomial});
                std::ostringstream label;
                label << "n=" << m.n << ",p=" << p;
                double const rhs = which == "published" ? m.rhs_published : m.rhs_binomial;
                r.add(make_check("lhs_minus_3se[" + label.str() + "]", m.lhs - 3.0 * m.lhs_stderr, Relation::le,
                                 rhs));
                t.labels.push_back(label.str());
            }
        }
        r.tables.push_back(std::move(t));
    };
}

Plan plan_truncation(ExperimentConfig const& ec)
{
    auto const& cfg = ec.source;
    auto const sde = make_sde(cfg, "sde", "increasing-drift");
    require_kind(sde, SdeKind::additive, "an additive");
    auto const triplet = make_triplet(cfg);
    if (triplet.nu.finite()) {
        throw ConfigError("triplet.nu", "the truncation experiment needs an infinite-activity measure");
    }
    auto const levels = cfg.get_doubles("truncation.levels", {2, 4, 8, 16});
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 1.0) || (i > 0 && !(levels[i] > levels[i - 1]))) {
            throw ConfigError("truncation.levels", "levels must exceed 1 and increase strictly");
        }
    }
    if (levels.size() < 2) {
        throw ConfigError("truncation.levels", "need at least two levels");
    }
    double const ref = cfg.get_double("truncation.reference_epsilon", 0.25 / levels.back());
    if (!(ref > 0.0 && ref <= 1.0 / levels.back())) {
        throw ConfigError("truncation.reference_epsilon", "must lie in (0, 1/max level]");
    }
    auto const mc = mc_with(ec);
    auto const numeric = ec.numeric;
    return [=](RunReport& r) {
        auto const rep = truncation_convergence_report(sde.sde.additive, triplet, levels, ref, mc, numeric.ode_step);
        Table t{"truncation", {"m", "mean_sq_diff", "stderr", "drop_to_next", "drop_stderr"}, {}, {}};
        double min_sep = std::numeric_limits<double>::infinity();
        for (auto const& row : rep.rows) {
            t.rows.push_back({row.level, row.mean_sq, row.std_error, row.drop, row.drop_stderr});
            if (row.drop_stderr > 0.0) {
                min_sep = std::min(min_sep, row.drop / row.drop_stderr);
            }
        }
        r.metric("reference_epsilon", ref);
        r.metric("min_drop_in_stderr", std::isfinite(min_sep) ? min_sep : 0.0);
        r.add(make_check("separated_decrease", rep.separated_decrease ? 1.0 : 0.0, Relation::eq, 1.0));
        r.tables.push_back(std::move(t));
    };
}

Plan prepare(ExperimentConfig const& ec)
{
    try {
        switch (ec.kind) {
        case ExperimentKind::duality:
            return plan_duality(ec);
        case ExperimentKind::product_formula:
            return plan_product_formula(ec);
        case ExperimentKind::fubini:
            return plan_fubini(ec);
        case ExperimentKind::derivative_check:
            return plan_derivative_check(ec);
        case ExperimentKind::monotone_drift:
            return plan_monotone_drift(ec);
        case ExperimentKind::local_monotone:
            return plan_local_monotone(ec);
        case ExperimentKind::wronskian:
            return plan_wronskian(ec);
        case ExperimentKind::density:
            return plan_density(ec);
        case ExperimentKind::moment_bound:
            return plan_moment_bound(ec);
        case ExperimentKind::truncation:
            return plan_truncation(ec);
        }
    } catch (ConfigError const&) {
        throw;
    } catch (std::invalid_argument const& e) {
        throw ConfigError("experiment", e.what());
    }
    throw ConfigError("experiment", "unhandled experiment kind");
}

class ScopedQuadTol
{
  public:
    explicit ScopedQuadTol(double tol) : saved_(quad::default_rel_tol()) { quad::set_default_rel_tol(tol); }
    ~ScopedQuadTol() { quad::set_default_rel_tol(saved_); }
    ScopedQuadTol(ScopedQuadTol const&) = delete;
    ScopedQuadTol& operator=(ScopedQuadTol const&) = delete;

  private:
    double saved_;
};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

char const* relation_text(Relation r)
{
    switch (r) {
    case Relation::le:
        return "<=";
    case Relation::ge:
        return ">=";
    case Relation::eq:
        return "==";
    }
    return "?";
}

nlohmann::ordered_json number(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

} // namespace

//---------------------------------------------------------------------------//

std::string to_string(ExperimentKind kind)
{
    for (auto const& [k, n] : kind_names()) {
        if (k == kind) {
            return n;
        }
    }
    return "unknown";
}

ExperimentKind parse_kind(std::string const& text)
{
    for (auto const& [k, n] : kind_names()) {
        if (n == text) {
            return k;
        }
    }
    throw ConfigError("experiment", "unknown experiment kind '" + text + "'");
}

std::vector<std::string> experiment_kinds()
{
    std::vector<std::string> out;
    for (auto const& kn : kind_names()) {
        out.push_back(kn.second);
    }
    return out;
}

ExperimentConfig parse_experiment(Config cfg)
{
    ExperimentConfig ec;
    ec.kind = parse_kind(cfg.get_string("experiment"));
    ec.mc.n_paths = cfg.get_uint("mc.n_paths", 1000);
    ec.mc.base_seed = cfg.get_uint("mc.base_seed", 1);
    ec.mc.threads = static_cast<unsigned>(cfg.get_uint("mc.threads", 0));
    if (ec.mc.n_paths == 0) {
        throw ConfigError("mc.n_paths", "must be positive");
    }
    if (ec.mc.base_seed == 0) {
        throw ConfigError("mc.base_seed", "must be positive");
    }
    ec.numeric.grid_size = cfg.get_uint("numeric.grid_size", 64);
    ec.numeric.ode_step = cfg.get_double("numeric.ode_step", 0.0);
    ec.numeric.quad_tol = cfg.get_double("numeric.quad_tol", 1e-13);
    ec.numeric.fd_epsilon = cfg.get_double("numeric.fd_epsilon", 1e-5);
    ec.numeric.criterion_tol = cfg.get_double("numeric.criterion_tol", 1e-12);
    if (ec.numeric.grid_size < 2) {
        throw ConfigError("numeric.grid_size", "must be at least 2");
    }
    if (ec.numeric.ode_step < 0.0) {
        throw ConfigError("numeric.ode_step", "must be positive (or 0 for the default)");
    }
    if (!(ec.numeric.quad_tol > 0.0 && ec.numeric.quad_tol < 1e-3)) {
        throw ConfigError("numeric.quad_tol", "must lie in (0, 1e-3)");
    }
    if (!(ec.numeric.fd_epsilon > 0.0)) {
        throw ConfigError("numeric.fd_epsilon", "must be positive");
    }
    if (!(ec.numeric.criterion_tol > 0.0)) {
        throw ConfigError("numeric.criterion_tol", "must be positive");
    }
    ec.output.path = cfg.get_string("output.path", "");
    ec.output.format = cfg.get_string("output.format", "json");
    if (ec.output.format != "json" && ec.output.format != "csv") {
        throw ConfigError("output.format", "expected json or csv");
    }
    ec.source = std::move(cfg);
    return ec;
}

Check make_check(std::string name, double value, Relation rel, double threshold, bool required)
{
    Check c{std::move(name), value, threshold, rel, required, false};
    switch (rel) {
    case Relation::le:
        c.pass = value <= threshold;
        break;
    case Relation::ge:
        c.pass = value >= threshold;
        break;
    case Relation::eq:
        c.pass = value == threshold;
        break;
    }
    return c;
}

void validate(ExperimentConfig const& cfg)
{
    ScopedQuadTol tol(cfg.numeric.quad_tol);
    (void)prepare(cfg);
    cfg.source.reject_unused();
}

RunReport run(ExperimentConfig const& cfg)
{
    auto const start = std::chrono::steady_clock::now();
    ScopedQuadTol tol(cfg.numeric.quad_tol);
    auto const plan = prepare(cfg);
    cfg.source.reject_unused();

    RunReport r;
    r.kind = to_string(cfg.kind);
    r.version = library_version();
    r.config = cfg.source;
    try {
        plan(r);
    } catch (ConfigError const&) {
        throw;
    } catch (std::exception const& e) {
        r.failure = e.what();
    }
    r.pass = !r.failure && count_required(r) == 0.0;
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

int exit_code(RunReport const& report)
{
    return report.pass ? 0 : 1;
}

std::string report_json(RunReport const& report)
{
    using json = nlohmann::ordered_json;
    json j;
    j["schema_version"] = 1;
    j["version"] = report.version;
    j["experiment"] = report.kind;
    j["pass"] = report.pass;
    j["failure"] = report.failure ? json(*report.failure) : json(nullptr);
    json config = json::object();
    for (auto const& key : report.config.keys()) {
        auto const& v = report.config.raw(key);
        config[key] = v.array ? json(v.items) : json(v.items.front());
    }
    j["config"] = config;
    json metrics = json::object();
    for (auto const& [name, value] : report.metrics) {
        metrics[name] = number(value);
    }
    j["metrics"] = metrics;
    json checks = json::array();
    for (auto const& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"value", number(c.value)},
                          {"relation", relation_text(c.relation)},
                          {"threshold", number(c.threshold)},
                          {"required", c.required},
                          {"pass", c.pass}});
    }
    j["checks"] = checks;
    json tables = json::object();
    for (auto const& t : report.tables) {
        json rows = json::array();
        for (auto const& row : t.rows) {
            json jr = json::array();
            for (double v : row) {
                jr.push_back(number(v));
            }
            rows.push_back(jr);
        }
        json jt = {{"columns", t.columns}, {"rows", rows}};
        if (!t.labels.empty()) {
            jt["labels"] = t.labels;
        }
        tables[t.name] = jt;
    }
    j["tables"] = tables;
    j["n_path_rows"] = report.rows.size();
    j["wall_clock_seconds"] = report.wall_clock_seconds;
    return j.dump(2) + "\n";
}

std::string report_csv(RunReport const& report)
{
    std::string out;
    if (!report.rows.empty()) {
        out = "seed,n_jumps,z_T,norm_sq,indicator\n";
        for (auto const& row : report.rows) {
            out += std::to_string(row.seed) + "," + std::to_string(row.n_jumps) + "," + fmt(row.z_T) + ","
                   + fmt(row.norm_sq) + "," + (row.indicator ? "1" : "0") + "\n";
        }
        return out;
    }
    out = "check,value,relation,threshold,required,pass\n";
    for (auto const& c : report.checks) {
        out += c.name + "," + fmt(c.value) + "," + relation_text(c.relation) + "," + fmt(c.threshold) + ","
               + (c.required ? "1" : "0") + "," + (c.pass ? "1" : "0") + "\n";
    }
    return out;
}

std::optional<std::filesystem::path> write_report(RunReport const& report, OutputOptions const& output)
{
    if (output.path.empty()) {
        return std::nullopt;
    }
    std::filesystem::path target(output.path);
    if (target.is_relative()) {
        if (char const* dir = std::getenv("LMC_OUTPUT_DIR"); dir && *dir) {
            target = std::filesystem::path(dir) / target;
        }
    }
    if (target.has_parent_path()) {
        std::filesystem::create_directories(target.parent_path());
    }
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << (output.format == "csv" ? report_csv(report) : report_json(report));
        if (!out.flush()) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
    return target;
}

std::string catalog_text()
{
    std::ostringstream os;
    std::string category;
    for (auto const& p : preset_catalog()) {
        if (p.category != category) {
            category = p.category;
            os << (os.tellp() > 0 ? "\n" : "") << "[" << category << "]\n";
        }
        os << "  " << p.name << ": " << p.description;
        if (!p.params.empty()) {
            os << " (";
            for (std::size_t i = 0; i < p.params.size(); ++i) {
                os << (i ? ", " : "") << p.params[i].name << "=" << p.params[i].default_value;
            }
            os << ")";
        }
        os << "\n";
    }
    os << "\n[experiment]\n";
    for (auto const& k : experiment_kinds()) {
        os << "  " << k << "\n";
    }
    return os.str();
}

} // namespace lmc

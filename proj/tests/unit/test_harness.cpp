#include "lmc/harness.hpp"
#include "lmc/presets.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lmc;

namespace {

std::string field_of_validate(std::string const& text)
{
    try {
        validate(parse_experiment(Config::parse(text)));
    } catch (ConfigError const& e) {
        return e.field();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("every catalog preset builds with its defaults")
{
    auto const cat = preset_catalog();
    CHECK(cat.size() > 40);
    LevyTriplet trip;
    trip.nu = LevyMeasure(DiscreteMeasure{{{1.0, 1.0}}});
    for (auto const& p : cat) {
        CAPTURE(p.category);
        CAPTURE(p.name);
        Config cfg;
        cfg.set("x", p.name);
        if (p.category == "measure") {
            auto const nu = make_measure(cfg, "x");
            if (!nu.finite()) {
                CHECK(nu.truncated(0.01).finite());
            }
        } else if (p.category == "kernel") {
            CHECK_NOTHROW(validate_kernel(make_kernel(cfg, "x"), trip));
        } else if (p.category == "test-function") {
            auto const g = make_test_function(cfg, "x");
            CHECK(std::isfinite(g.value(0.5)));
        } else if (p.category == "weight") {
            CHECK_NOTHROW(validate_weight(make_weight(cfg, "x"), trip));
        } else if (p.category == "lambda") {
            CHECK_NOTHROW(make_lambda(cfg, "x"));
        } else if (p.category == "jump-set") {
            CHECK_NOTHROW(make_jump_set(cfg, "x"));
        } else if (p.category == "outer") {
            if (p.name != "tanh-times-cos") {
                auto const [f, df] = make_outer(cfg, "x");
                double const e = 1e-6;
                CHECK(df(0.3) == doctest::Approx((f(0.3 + e) - f(0.3 - e)) / (2 * e)).epsilon(1e-6));
            }
        } else if (p.category == "integrand") {
            auto const phi = make_integrand(cfg, "x", 2);
            std::vector<std::vector<JumpRecord>> samples{{{0.2, 1.0}, {0.6, -0.5}}};
            CHECK_NOTHROW(validate_integrand(phi, samples));
        } else if (p.category == "sde") {
            CHECK_NOTHROW(make_sde(cfg, "x"));
        } else if (p.category == "duality") {
            auto const d = make_duality_preset(p.name);
            CHECK_NOTHROW(validate_functional(d.F, *d.triplet));
            CHECK_NOTHROW(validate_weight(d.k, *d.triplet));
        } else {
            FAIL("unexpected category " << p.category);
        }
        // Duality presets are built by name alone and never read the config.
        if (p.category != "duality" && p.name != "tanh-times-cos") {
            CHECK(cfg.unused_keys().empty());
        }
    }
    CHECK(duality_preset_names().size() == 6);
}

TEST_CASE("preset parameters and errors")
{
    auto const cfg = Config::parse("nu = poisson\nnu.rate = 2.5\nnu.size = -1\nk = nonsense\nbad = poisson\nbad.rate = -1\n");
    auto const nu = make_measure(cfg, "nu");
    CHECK(nu.total_mass() == 2.5);
    CHECK(nu.sample(0.3) == -1.0);
    try {
        (void)make_kernel(cfg, "k");
        FAIL("expected an error");
    } catch (ConfigError const& e) {
        CHECK(e.field() == "k");
    }
    try {
        (void)make_measure(cfg, "bad");
        FAIL("expected an error");
    } catch (ConfigError const& e) {
        CHECK(e.field() == "bad.rate");
    }
}

TEST_CASE("experiment configs")
{
    CHECK(parse_kind("moment-bound") == ExperimentKind::moment_bound);
    CHECK_THROWS_AS(parse_kind("nope"), ConfigError);
    CHECK(experiment_kinds().size() == 10);
    for (auto const& k : experiment_kinds()) {
        CHECK(to_string(parse_kind(k)) == k);
    }
    CHECK(field_of_validate("experiment = fubini\ntriplet.nu = poisson\nfubini.familly = mixed\n") == "fubini.familly");
    CHECK(field_of_validate("experiment = fubini\ntriplet.nu = lognormal\n") == "triplet.nu");
    CHECK(field_of_validate("experiment = fubini\ntriplet.nu = gamma-like\n") == "triplet.truncation");
    CHECK(field_of_validate("experiment = fubini\ntriplet.nu = poisson\ntriplet.truncation = 0.1\n")
          == "triplet.truncation");
    CHECK(field_of_validate("experiment = fubini\nmc.n_paths = 0\n") == "mc.n_paths");
    CHECK(field_of_validate("experiment = fubini\noutput.format = xml\n") == "output.format");
    CHECK(field_of_validate("experiment = wronskian\nsde = increasing-drift\n") == "sde");
    CHECK(field_of_validate("experiment = derivative-check\nderivative.lambda = band\nderivative.lambda.lo = 1.5\n")
          == "derivative.theta");
    CHECK(field_of_validate("experiment = fubini\ntriplet.nu = poisson\n") == "<no error>");
}

TEST_CASE("shipped configs validate")
{
    std::size_t n = 0;
    for (auto const& entry : std::filesystem::directory_iterator(LMC_SOURCE_DIR "/configs")) {
        if (entry.path().extension() != ".cfg") {
            continue;
        }
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(validate(parse_experiment(Config::load(entry.path()))));
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("reports are deterministic")
{
    auto const text = "experiment = monotone-drift\nsde = increasing-drift\ntriplet.nu = compound-two-atom\n"
                      "mc.n_paths = 300\nmc.threads = 4\noutput.format = csv\n";
    auto const a = run(parse_experiment(Config::parse(text)));
    auto const b = run(parse_experiment(Config::parse(std::string(text) + "")));
    auto c_cfg = parse_experiment(Config::parse(text));
    c_cfg.mc.threads = 1;
    auto const c = run(c_cfg);
    CHECK(a.pass);
    CHECK(exit_code(a) == 0);
    CHECK(report_csv(a) == report_csv(b));
    CHECK(report_csv(a) == report_csv(c));
    CHECK(report_csv(a).rfind("seed,n_jumps,z_T,norm_sq,indicator\n", 0) == 0);

    auto const j = nlohmann::json::parse(report_json(a));
    CHECK(j["experiment"] == "monotone-drift");
    CHECK(j["pass"] == true);
    CHECK(j["config"]["mc.n_paths"] == "300");
    CHECK(j["checks"].size() == 3);
}

TEST_CASE("numeric failure and empty samples")
{
    auto const fail = run(parse_experiment(
        Config::parse("experiment = fubini\ntriplet.nu = finite-density\ntriplet.sigma = 0.8\nmc.n_paths = 5\n"
                      "check.max_relative = 0\n")));
    CHECK_FALSE(fail.pass);
    CHECK(exit_code(fail) == 1);
    auto const empty = run(parse_experiment(
        Config::parse("experiment = density\ntriplet.nu = poisson\ntriplet.nu.rate = 50\n"
                      "density.conditioning = no-jumps\nmc.n_paths = 20\n")));
    CHECK_FALSE(empty.pass);
    REQUIRE(empty.failure);
}

TEST_CASE("atomic report writing honours the output directory")
{
    auto const dir = std::filesystem::temp_directory_path() / "lmc_harness_test";
    std::filesystem::remove_all(dir);
    ::setenv("LMC_OUTPUT_DIR", dir.c_str(), 1);
    auto ec = parse_experiment(Config::parse("experiment = fubini\nmc.n_paths = 3\noutput.path = sub/r.json\n"));
    auto const r = run(ec);
    auto const written = write_report(r, ec.output);
    ::unsetenv("LMC_OUTPUT_DIR");
    REQUIRE(written);
    CHECK(*written == dir / "sub/r.json");
    CHECK(std::filesystem::exists(*written));
    CHECK_FALSE(std::filesystem::exists(dir / "sub/r.json.tmp"));
    std::ifstream in(*written);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == report_json(r));
    std::filesystem::remove_all(dir);
    CHECK_FALSE(write_report(r, OutputOptions{}));
}

TEST_CASE("catalog text lists every category")
{
    auto const text = catalog_text();
    for (auto const* c : {"[measure]", "[kernel]", "[sde]", "[duality]", "[experiment]"}) {
        CHECK(text.find(c) != std::string::npos);
    }
}

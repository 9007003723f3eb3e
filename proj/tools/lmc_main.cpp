#include "lmc/harness.hpp"
#include "lmc/presets.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigError = 2;

void print_summary(lmc::RunReport const& r)
{
    std::cout << r.kind << ": " << (r.pass ? "PASS" : "FAIL");
    if (r.failure) {
        std::cout << " (" << *r.failure << ")";
    }
    std::cout << "  [" << r.wall_clock_seconds << " s]\n";
    for (auto const& [name, value] : r.metrics) {
        std::cout << "  " << name << " = " << value << "\n";
    }
    for (auto const& c : r.checks) {
        char const* rel = c.relation == lmc::Relation::le ? "<=" : c.relation == lmc::Relation::ge ? ">=" : "==";
        std::cout << "  " << (c.pass ? "ok  " : (c.required ? "FAIL" : "warn")) << " " << c.name << " = " << c.value
                  << " " << rel << " " << c.threshold << "\n";
    }
}

lmc::ExperimentConfig load(std::string const& path, std::vector<std::string> const& overrides)
{
    auto cfg = lmc::Config::load(path);
    for (auto const& o : overrides) {
        auto one = lmc::Config::parse(o);
        for (auto const& key : one.keys()) {
            auto const& v = one.raw(key);
            if (v.array) {
                cfg.set_array(key, v.items);
            } else {
                cfg.set(key, v.items.front());
            }
        }
    }
    return lmc::parse_experiment(std::move(cfg));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo checks for local Malliavin calculus on Lévy paths"};
    app.set_version_flag("--version", lmc::library_version());
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("-s,--set", overrides, "override a key, e.g. -s 'mc.n_paths = 500'");
    run->add_flag("-q,--quiet", quiet, "no summary on stdout");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    validate->add_option("-s,--set", overrides, "override a key");

    auto* list = app.add_subcommand("list-presets", "print every named preset and experiment kind");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            std::cout << lmc::catalog_text();
            return 0;
        }
        auto const ec = load(config_path, overrides);
        if (validate->parsed()) {
            lmc::validate(ec);
            std::cout << "ok: " << lmc::to_string(ec.kind) << "\n";
            return 0;
        }
        auto const report = lmc::run(ec);
        if (auto written = lmc::write_report(report, ec.output)) {
            if (!quiet) {
                std::cout << "wrote " << written->string() << "\n";
            }
        }
        if (!quiet) {
            print_summary(report);
        }
        return lmc::exit_code(report);
    } catch (lmc::ConfigError const& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#pragma once

#include "lmc/config.hpp"
#include "lmc/experiments.hpp"
#include "lmc/mc.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lmc {

std::string library_version();

enum class ExperimentKind {
    duality,
    product_formula,
    fubini,
    derivative_check,
    monotone_drift,
    local_monotone,
    wronskian,
    density,
    moment_bound,
    truncation
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(std::string const& text); // throws ConfigError at "experiment"
std::vector<std::string> experiment_kinds();

struct NumericOptions
{
    std::size_t grid_size = 64;
    double ode_step = 0.0; // 0: T/2048
    double quad_tol = 1e-13;
    double fd_epsilon = 1e-5;
    double criterion_tol = 1e-12;
};

struct OutputOptions
{
    std::string path; // empty: no file output
    std::string format = "json"; // json | csv
};

/// Parsed common sections; experiment-specific keys stay in `source`.
struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::duality;
    MCConfig mc;
    NumericOptions numeric;
    OutputOptions output;
    Config source;
};

ExperimentConfig parse_experiment(Config cfg);

enum class Relation { le, ge, eq };

struct Check
{
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    Relation relation = Relation::le;
    // Optional checks are reported but do not decide the verdict.
    bool required = true;
    bool pass = false;
};

Check make_check(std::string name, double value, Relation rel, double threshold, bool required = true);

struct Table
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::string> labels; // one per row, may be empty
    std::vector<std::vector<double>> rows;
};

struct RunReport
{
    std::string kind;
    std::string version;
    Config config;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<Check> checks;
    std::vector<Table> tables;
    std::vector<PathRow> rows;
    std::optional<std::string> failure;
    double wall_clock_seconds = 0.0;
    bool pass = false;

    void metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
    void add(Check c) { checks.push_back(std::move(c)); }
};

/// Builds every object named by the config and rejects unknown keys,
/// without simulating. Throws ConfigError.
void validate(ExperimentConfig const& cfg);

/// Runs the experiment. Configuration problems throw ConfigError; numeric
/// failures during the run produce a failed report with `failure` set.
RunReport run(ExperimentConfig const& cfg);

/// 0 pass, 1 numeric or statistical failure.
int exit_code(RunReport const& report);

std::string report_json(RunReport const& report);
/// seed,n_jumps,z_T,norm_sq,indicator; falls back to the check list when the
/// experiment has no per-path rows. Byte-identical for identical runs.
std::string report_csv(RunReport const& report);

/// Writes output.path (relative paths resolve against $LMC_OUTPUT_DIR when
/// set) through a temporary file and rename. Returns the written path.
std::optional<std::filesystem::path> write_report(RunReport const& report, OutputOptions const& output);

std::string catalog_text();

} // namespace lmc

// powerflow command-line front end: validate | calibrate | simulate |
// backtest | scenario | export. Exit codes: 0 success, 1 domain error,
// 2 I/O or parse failure.

#include "powerflow/calibration.hpp"
#include "powerflow/core.hpp"
#include "powerflow/panel.hpp"
#include "powerflow/reports.hpp"
#include "powerflow/scenario.hpp"
#include "powerflow/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace powerflow;

struct Options {
    std::string data_dir;
    std::string params_file;
    std::string out;
    std::string scenario_file;
    std::string mode = "naive";
    std::string denominator = "simulated";
    std::string grid = "1.001:2.0:0.001";
    int base_year = -1;
    int years = -1;
};

Parameters load_parameters(const std::string& file) {
    Parameters params;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) {
            throw ParseError(file, 0, "cannot open file");
        }
        nlohmann::json doc;
        try {
            in >> doc;
            params.beta = doc.at("beta").get<double>();
            params.mu = doc.at("mu").get<double>();
            params.lambda = doc.at("lambda").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(file, 0, e.what());
        }
    }
    params.require_model_ranges();
    return params;
}

BetaGrid parse_grid(const std::string& text) {
    BetaGrid grid;
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        !parse_double(text.substr(0, first), grid.lo) ||
        !parse_double(text.substr(first + 1, second - first - 1), grid.hi) ||
        !parse_double(text.substr(second + 1), grid.step)) {
        throw ParseError("--grid", 0, "expected lo:hi:step, got '" + text + "'");
    }
    return grid;
}

PanelData load_data(const Options& opt) {
    if (opt.data_dir.empty()) {
        throw std::runtime_error("--data is required");
    }
    return load_panel(PanelPaths::in_directory(opt.data_dir));
}

int latest_wealth_year(const PanelData& panel) {
    if (panel.wealth.empty()) {
        throw std::runtime_error("panel has no wealth rows");
    }
    int latest = panel.wealth.begin()->first.second;
    for (const auto& [key, value] : panel.wealth) {
        (void)value;
        latest = std::max(latest, key.second);
    }
    return latest;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cout << "warning: " << w << "\n";
    }
}

fs::path out_or(const Options& opt, const char* fallback) {
    return opt.out.empty() ? fs::path(fallback) : fs::path(opt.out);
}

int cmd_validate(const Options& opt) {
    const PanelData panel = load_data(opt);
    const int year = opt.base_year >= 0 ? opt.base_year : latest_wealth_year(panel);

    PanelSubset subset = drop_missing_wealth(panel, year);
    print_warnings(subset.warnings);
    if (subset.panel.registry.empty()) {
        throw std::runtime_error("no wealth data in year " + std::to_string(year));
    }
    const SizeVector sizes = sizes_at(subset.panel, year);
    const TacticBuild build = build_tactics(subset.panel, year, sizes, ZeroSizePolicy::Error);
    print_warnings(build.warnings);

    const ValidationReport report = validate({subset.panel.registry, sizes, build.matrix});
    if (!report.empty()) {
        for (const auto& violation : report) {
            std::cout << "violation: " << violation.message << "\n";
        }
        return 1;
    }
    std::cout << "OK: " << subset.panel.registry.size() << " countries, base year " << year
              << ", column sums within 1e-9\n";
    return 0;
}

int cmd_calibrate(const Options& opt, const std::string& which) {
    const PanelData panel = load_data(opt);
    if (which == "mu") {
        const auto episodes = episodes_from_conflicts(panel);
        const MuEstimate estimate = estimate_mu(panel, episodes);
        write_mu_report_csv(out_or(opt, "mu_report.csv"), estimate);
        std::cout << "mu: raw mean " << format_double(estimate.raw_mean) << " over "
                  << estimate.count << " records, trimmed mean "
                  << format_double(estimate.trimmed_mean) << " over " << estimate.trimmed_count
                  << "\n";
        return 0;
    }
    if (which == "growth") {
        const GrowthFit fit = fit_growth_regression(panel);
        write_growth_fit_csv(out_or(opt, "growth_fit.csv"), fit);
        std::cout << "growth: lambda (intercept) " << format_double(fit.intercept) << ", slope "
                  << format_double(fit.slope) << ", n " << fit.n << "\n";
        return 0;
    }
    // beta
    const Parameters params = load_parameters(opt.params_file);
    const BetaFit fit = fit_beta(panel, params.lambda, params.mu, parse_grid(opt.grid));
    print_warnings(fit.warnings);
    write_beta_curve_csv(out_or(opt, "beta_curve.csv"), fit);
    std::cout << "beta: " << format_double(fit.best_beta) << " with mean distance "
              << format_double(fit.objective) << "\n";
    return 0;
}

FractionDenominator denominator_of(const Options& opt) {
    if (opt.denominator == "simulated") return FractionDenominator::Simulated;
    if (opt.denominator == "actual") return FractionDenominator::Actual;
    throw std::runtime_error("unknown denominator mode '" + opt.denominator + "'");
}

Trajectory run_simulation(const PanelData& panel, const Options& opt, int base_year, int years,
                          const Parameters& params) {
    if (opt.mode == "naive") {
        return simulate_naive(panel, base_year, years, params);
    }
    if (opt.mode == "dynamic") {
        return simulate_dynamic(panel, base_year, base_year + years, params, denominator_of(opt));
    }
    throw std::runtime_error("unknown mode '" + opt.mode + "'");
}

int cmd_simulate(const Options& opt) {
    const PanelData panel = load_data(opt);
    const Parameters params = load_parameters(opt.params_file);
    if (opt.base_year < 0 || opt.years < 0) {
        throw std::runtime_error("--base-year and --years are required");
    }
    const Trajectory trajectory = run_simulation(panel, opt, opt.base_year, opt.years, params);
    print_warnings(trajectory.warnings);
    const fs::path out = out_or(opt, "trajectory.csv");
    write_trajectory_csv(out, trajectory);
    std::cout << "wrote " << out.string() << " (" << trajectory.years.size() << " years x "
              << trajectory.registry.size() << " countries)\n";
    return 0;
}

int cmd_backtest(const Options& opt) {
    const PanelData panel = load_data(opt);
    const Parameters params = load_parameters(opt.params_file);
    if (opt.base_year < 0 || opt.years < 0) {
        throw std::runtime_error("--base-year and --years are required");
    }
    const BacktestReport report =
        backtest(panel, params, opt.base_year, opt.base_year + opt.years, denominator_of(opt));
    print_warnings(report.warnings);

    const fs::path out = out_or(opt, "backtest.csv");
    Trajectory predicted{report.registry, report.years, report.predicted, {}};
    write_trajectory_csv(out, predicted);

    fs::path metrics = out;
    metrics.replace_filename(out.stem().string() + "_metrics" + out.extension().string());
    write_backtest_metrics_csv(metrics, report);
    std::cout << "wrote " << out.string() << " and " << metrics.string() << "\n";
    return 0;
}

int cmd_scenario(const Options& opt) {
    if (opt.scenario_file.empty()) {
        throw std::runtime_error("--scenario-file is required");
    }
    const PanelData panel = load_data(opt);
    const Parameters params = load_parameters(opt.params_file);
    const Scenario scenario = load_scenario(opt.scenario_file);
    const PanelData edited = apply_scenario(panel, scenario);
    const Trajectory trajectory =
        run_simulation(edited, opt, scenario.base_year, scenario.horizon, params);
    print_warnings(trajectory.warnings);
    const fs::path out = out_or(opt, "trajectory.csv");
    write_trajectory_csv(out, trajectory);
    std::cout << "wrote " << out.string() << " for scenario '" << scenario.name << "'\n";
    return 0;
}

int cmd_export(const Options& opt, const std::string& what) {
    const PanelData panel = load_data(opt);
    const int year = opt.base_year >= 0 ? opt.base_year : latest_wealth_year(panel);
    PanelSubset subset = drop_missing_wealth(panel, year);
    print_warnings(subset.warnings);
    if (subset.panel.registry.empty()) {
        throw std::runtime_error("no wealth data in year " + std::to_string(year));
    }
    const SizeVector sizes = sizes_at(subset.panel, year);

    if (what == "matrix") {
        const Parameters params = load_parameters(opt.params_file);
        const TacticBuild build = build_tactics(subset.panel, year, sizes, ZeroSizePolicy::Error);
        print_warnings(build.warnings);
        const fs::path out = out_or(opt, "matrix.csv");
        write_matrix_csv(out, subset.panel.registry,
                         build.matrix.combined(params.beta, params.mu, params.lambda));
        std::cout << "wrote " << out.string() << "\n";
        return 0;
    }
    // graph
    const GraphExport graph =
        build_graph(subset.panel, year, sizes, GraphExport::EdgeRule::PrimaryPartner);
    const fs::path out = out_or(opt, "graph.dot");
    write_graph_dot(out, graph);
    std::cout << "wrote " << out.string() << " (" << graph.edges.size() << " edges)\n";
    return 0;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--data", opt.data_dir, "Directory holding wealth/trade/milex/conflicts CSVs");
    cmd->add_option("--params", opt.params_file, "JSON parameter file {\"beta\",\"mu\",\"lambda\"}");
    cmd->add_option("--out", opt.out, "Output file path");
    cmd->add_option("--base-year", opt.base_year, "Base (start) year");
    cmd->add_option("--years", opt.years, "Number of years to simulate");
    cmd->add_option("--mode", opt.mode, "Simulation mode: naive|dynamic");
    cmd->add_option("--denominator", opt.denominator,
                    "Dynamic fraction denominator: simulated|actual");
    cmd->add_option("--scenario-file", opt.scenario_file, "Scenario JSON file");
    cmd->add_option("--grid", opt.grid, "Beta search grid lo:hi:step");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"powerflow: national power as wealth flowing through trade and conflict networks"};
    app.require_subcommand(1);

    Options opt;
    std::string calibrate_which;
    std::string export_what;

    auto* validate_cmd = app.add_subcommand("validate", "Load a data directory and check invariants");
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Estimate mu, growth (lambda), or beta");
    calibrate_cmd->add_option("which", calibrate_which, "mu|growth|beta")
        ->required()
        ->check(CLI::IsMember({"mu", "growth", "beta"}));
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a naive or dynamic simulation");
    auto* backtest_cmd = app.add_subcommand("backtest", "Dynamic simulation scored against actual wealth");
    auto* scenario_cmd = app.add_subcommand("scenario", "Apply scenario edits, then simulate");
    auto* export_cmd = app.add_subcommand("export", "Export the combined matrix or partner graph");
    export_cmd->add_option("what", export_what, "matrix|graph")
        ->required()
        ->check(CLI::IsMember({"matrix", "graph"}));

    for (auto* cmd : {validate_cmd, calibrate_cmd, simulate_cmd, backtest_cmd, scenario_cmd, export_cmd}) {
        add_common(cmd, opt);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(opt);
        if (calibrate_cmd->parsed()) return cmd_calibrate(opt, calibrate_which);
        if (simulate_cmd->parsed()) return cmd_simulate(opt);
        if (backtest_cmd->parsed()) return cmd_backtest(opt);
        if (scenario_cmd->parsed()) return cmd_scenario(opt);
        if (export_cmd->parsed()) return cmd_export(opt, export_what);
    } catch (const powerflow::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

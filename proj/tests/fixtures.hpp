#pragma once

// Shared builders for the test suites: scratch directories, random valid
// power structures, and panels whose wealth series are produced by the
// engine itself (the self-consistency oracles).

#include "powerflow/calibration.hpp"
#include "powerflow/core.hpp"
#include "powerflow/panel.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

inline fs::path make_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    fs::path dir = fs::temp_directory_path() /
                   ("powerflow_tests_" + std::to_string(::getpid())) /
                   (tag + "_" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

inline void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path);
    out << contents;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// AAA, AAB, AAC, ... base-26 codes
inline std::vector<std::string> make_codes(int n) {
    std::vector<std::string> codes;
    codes.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::string code = "AAA";
        code[2] = static_cast<char>('A' + i % 26);
        code[1] = static_cast<char>('A' + (i / 26) % 26);
        code[0] = static_cast<char>('A' + (i / 676) % 26);
        codes.push_back(code);
    }
    return codes;
}

inline powerflow::PanelData skeleton_panel(const std::vector<std::string>& codes, int first_year,
                                           int last_year) {
    powerflow::PanelData panel;
    panel.registry = powerflow::CountryRegistry(codes);
    panel.first_year = first_year;
    panel.last_year = last_year;
    return panel;
}

// Random column-stochastic decomposition with strictly positive sizes.
inline powerflow::PowerStructure random_power_structure(std::mt19937& rng, int n,
                                                        bool with_destruction = true) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    powerflow::PowerStructure ps;
    ps.registry = powerflow::CountryRegistry(make_codes(n));
    ps.tactics.constructive = Eigen::MatrixXd::Zero(n, n);
    ps.tactics.destructive = Eigen::MatrixXd::Zero(n, n);
    ps.tactics.retained = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const double retained = 0.2 + 0.8 * unit(rng);
        const double remaining = 1.0 - retained;
        Eigen::VectorXd plus = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd minus = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            plus[i] = unit(rng);
            if (with_destruction) minus[i] = 0.3 * unit(rng);
        }
        const double total = plus.sum() + minus.sum();
        if (total > 0.0) {
            plus *= remaining / total;
            minus *= remaining / total;
        }
        ps.tactics.constructive.col(j) = plus;
        ps.tactics.destructive.col(j) = minus;
        ps.tactics.retained[j] = 1.0 - plus.sum() - minus.sum();
    }
    ps.sizes = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
        ps.sizes[i] = 1.0 + 999.0 * unit(rng);
    }
    return ps;
}

// Wealth series advanced by the engine's own law of motion: flows for
// each year come from `add_flows`, wealth(t+1) = step(tactics(t), s(t)).
inline powerflow::PanelData generate_with_engine(
    const std::vector<std::string>& codes, int first_year, int last_year,
    const Eigen::VectorXd& initial_wealth, const powerflow::Parameters& params,
    const std::function<void(powerflow::PanelData&, int, const Eigen::VectorXd&)>& add_flows) {
    powerflow::PanelData panel = skeleton_panel(codes, first_year, last_year);
    Eigen::VectorXd wealth = initial_wealth;
    for (int i = 0; i < panel.registry.size(); ++i) {
        panel.wealth[{panel.registry.code(i), first_year}] = wealth[i];
    }
    for (int year = first_year; year < last_year; ++year) {
        add_flows(panel, year, wealth);
        const auto build =
            powerflow::build_tactics(panel, year, wealth, powerflow::ZeroSizePolicy::Error);
        const auto civil_war = powerflow::civil_war_diagonal(panel, year, wealth);
        powerflow::PowerStructure ps{panel.registry, wealth, build.matrix};
        wealth = powerflow::step(ps, params, civil_war);
        for (int i = 0; i < panel.registry.size(); ++i) {
            panel.wealth[{panel.registry.code(i), year + 1}] = wealth[i];
        }
    }
    return panel;
}

// Ring of explicit two-way flows, a few percent of current wealth, no
// conflicts and no clamping; wealth follows the engine exactly.
inline powerflow::PanelData engine_ring_panel(int n_countries, int first_year, int n_years,
                                              const powerflow::Parameters& params,
                                              double flow_scale = 0.02) {
    const auto codes = make_codes(n_countries);
    Eigen::VectorXd initial(n_countries);
    for (int i = 0; i < n_countries; ++i) {
        initial[i] = 80.0 + 15.0 * i;
    }
    return generate_with_engine(
        codes, first_year, first_year + n_years, initial, params,
        [&](powerflow::PanelData& panel, int year, const Eigen::VectorXd& wealth) {
            const int n = panel.registry.size();
            for (int i = 0; i < n; ++i) {
                const int next = (i + 1) % n;
                const double wobble = 1.0 + 0.1 * ((i + year) % 3);
                panel.trade[{panel.registry.code(i), panel.registry.code(next), year}] =
                    flow_scale * wobble * wealth[i];
                panel.trade[{panel.registry.code(next), panel.registry.code(i), year}] =
                    0.5 * flow_scale * wobble * wealth[next];
            }
        });
}

// Disjoint trading pairs whose wealth advances exactly on the line
// g = intercept + slope * tp, tp taken from the panel's own volumes.
inline powerflow::PanelData growth_line_panel(int n_pairs, int first_year, int n_years,
                                              double intercept = 1.025, double slope = 0.201) {
    const int n = 2 * n_pairs;
    const auto codes = make_codes(n);
    powerflow::PanelData panel = skeleton_panel(codes, first_year, first_year + n_years);
    Eigen::VectorXd wealth(n);
    for (int i = 0; i < n; ++i) {
        wealth[i] = 60.0 + 12.0 * i;
    }
    for (int i = 0; i < n; ++i) {
        panel.wealth[{panel.registry.code(i), first_year}] = wealth[i];
    }
    for (int year = first_year; year < first_year + n_years; ++year) {
        for (int k = 0; k < n_pairs; ++k) {
            const int a = 2 * k;
            const int b = 2 * k + 1;
            panel.trade[{panel.registry.code(a), panel.registry.code(b), year}] =
                0.010 * (k + 1) * wealth[a];
            panel.trade[{panel.registry.code(b), panel.registry.code(a), year}] =
                0.007 * (k + 2) * wealth[a];
        }
        for (int i = 0; i < n; ++i) {
            const double tp = panel.trade_volume(panel.registry.code(i), year) / wealth[i];
            wealth[i] *= intercept + slope * tp;
            panel.wealth[{panel.registry.code(i), year + 1}] = wealth[i];
        }
    }
    return panel;
}

}  // namespace testutil

#include "powerflow/simulation.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace powerflow {

namespace {

void append(std::vector<std::string>& into, const std::vector<std::string>& from) {
    into.insert(into.end(), from.begin(), from.end());
}

PanelSubset subset_for(const PanelData& panel, int year) {
    if (year < panel.first_year || year > panel.last_year) {
        throw std::runtime_error("year " + std::to_string(year) + " not covered by the panel (" +
                                 std::to_string(panel.first_year) + ".." +
                                 std::to_string(panel.last_year) + ")");
    }
    PanelSubset subset = drop_missing_wealth(panel, year);
    if (subset.panel.registry.empty()) {
        throw std::runtime_error("no wealth data in year " + std::to_string(year));
    }
    return subset;
}

}  // namespace

Trajectory simulate_naive(const PanelData& panel, int base_year, int n_years,
                          const Parameters& params) {
    if (n_years < 0) {
        throw std::invalid_argument("number of years must be non-negative");
    }
    PanelSubset subset = subset_for(panel, base_year);
    const PanelData& p = subset.panel;

    Trajectory trajectory;
    trajectory.registry = p.registry;
    trajectory.warnings = std::move(subset.warnings);

    SizeVector sizes = sizes_at(p, base_year);
    const TacticBuild build = build_tactics(p, base_year, sizes, ZeroSizePolicy::Error);
    append(trajectory.warnings, build.warnings);
    const Eigen::VectorXd civil_war = civil_war_diagonal(p, base_year, sizes);

    trajectory.years.resize(static_cast<size_t>(n_years) + 1);
    std::iota(trajectory.years.begin(), trajectory.years.end(), base_year);
    trajectory.sizes.resize(n_years + 1, p.registry.size());
    trajectory.sizes.row(0) = sizes.transpose();

    PowerStructure ps{p.registry, std::move(sizes), build.matrix};
    for (int k = 1; k <= n_years; ++k) {
        ps.sizes = step(ps, params, civil_war);
        trajectory.sizes.row(k) = ps.sizes.transpose();
    }
    return trajectory;
}

Trajectory simulate_dynamic(const PanelData& panel, int start_year, int end_year,
                            const Parameters& params, FractionDenominator denominator) {
    if (end_year < start_year) {
        throw std::invalid_argument("end year precedes start year");
    }
    if (end_year > start_year && end_year - 1 > panel.last_year) {
        throw std::runtime_error("missing flow year " + std::to_string(panel.last_year + 1) +
                                 " (panel ends in " + std::to_string(panel.last_year) + ")");
    }
    PanelSubset subset = subset_for(panel, start_year);
    const PanelData& p = subset.panel;

    Trajectory trajectory;
    trajectory.registry = p.registry;
    trajectory.warnings = std::move(subset.warnings);

    const int n_years = end_year - start_year;
    trajectory.years.resize(static_cast<size_t>(n_years) + 1);
    std::iota(trajectory.years.begin(), trajectory.years.end(), start_year);
    trajectory.sizes.resize(n_years + 1, p.registry.size());

    PowerStructure ps{p.registry, sizes_at(p, start_year), TacticMatrix{}};
    trajectory.sizes.row(0) = ps.sizes.transpose();

    for (int year = start_year; year < end_year; ++year) {
        const SizeVector denom =
            denominator == FractionDenominator::Simulated ? ps.sizes : sizes_at(p, year);
        TacticBuild build = build_tactics(p, year, denom, ZeroSizePolicy::WarnRetain);
        append(trajectory.warnings, build.warnings);
        const Eigen::VectorXd civil_war =
            civil_war_diagonal(p, year, denom, ZeroSizePolicy::WarnRetain);

        ps.tactics = std::move(build.matrix);
        ps.sizes = step(ps, params, civil_war);
        trajectory.sizes.row(year - start_year + 1) = ps.sizes.transpose();
    }
    return trajectory;
}

std::vector<double> coalition_power(const Trajectory& trajectory,
                                    const std::vector<std::string>& members) {
    std::vector<int> indexes;
    indexes.reserve(members.size());
    for (const auto& member : members) {
        indexes.push_back(trajectory.registry.index_of(member));
    }
    std::vector<double> series(trajectory.years.size(), 0.0);
    for (size_t row = 0; row < trajectory.years.size(); ++row) {
        double total = 0.0;
        for (int idx : indexes) {
            total += trajectory.sizes(static_cast<Eigen::Index>(row), idx);
        }
        series[row] = total;
    }
    return series;
}

BacktestReport backtest(const PanelData& panel, const Parameters& params, int start_year,
                        int end_year, FractionDenominator denominator) {
    Trajectory trajectory = simulate_dynamic(panel, start_year, end_year, params, denominator);

    BacktestReport report;
    report.registry = trajectory.registry;
    report.years = trajectory.years;
    report.predicted = trajectory.sizes;
    report.warnings = std::move(trajectory.warnings);

    const int n = report.registry.size();
    const auto n_rows = static_cast<Eigen::Index>(report.years.size());
    report.actual.resize(n_rows, n);
    for (Eigen::Index row = 0; row < n_rows; ++row) {
        const int year = report.years[static_cast<size_t>(row)];
        for (int i = 0; i < n; ++i) {
            const auto value = panel.wealth_at(report.registry.code(i), year);
            if (!value) {
                throw std::runtime_error("backtest needs actual wealth for " +
                                         report.registry.code(i) + " in " + std::to_string(year));
            }
            report.actual(row, i) = *value;
        }
    }

    report.year_distance.resize(static_cast<size_t>(n_rows));
    for (Eigen::Index row = 0; row < n_rows; ++row) {
        report.year_distance[static_cast<size_t>(row)] =
            (report.predicted.row(row) - report.actual.row(row)).norm();
    }

    report.country_mare.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (Eigen::Index row = 0; row < n_rows; ++row) {
            const double actual = report.actual(row, i);
            const double error = std::abs(report.predicted(row, i) - actual);
            if (actual > 0.0) {
                total += error / actual;
            } else if (error > 0.0) {
                total = std::numeric_limits<double>::infinity();
            }
        }
        report.country_mare[static_cast<size_t>(i)] = total / static_cast<double>(n_rows);
    }
    return report;
}

}  // namespace powerflow

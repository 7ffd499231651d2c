#pragma once

#include "powerflow/core.hpp"
#include "powerflow/panel.hpp"

#include <string>
#include <vector>

namespace powerflow {

struct Trajectory {
    CountryRegistry registry;
    std::vector<int> years;  // row labels; years[0] is the base year
    Eigen::MatrixXd sizes;   // years x countries
    std::vector<std::string> warnings;
};

/// How yearly absolute flows are turned into allocation fractions while
/// a dynamic simulation runs: divided by the simulated sizes (keeping
/// columns true allocation percentages) or by the actual wealth record.
enum class FractionDenominator { Simulated, Actual };

/// Base-year tactics held fixed (the "foreign policy" is frozen as
/// fractions), sizes iterated n_years times.
Trajectory simulate_naive(const PanelData& panel, int base_year, int n_years,
                          const Parameters& params);

/// Each calendar year's absolute flows are converted to fractions of
/// the current sizes (clamped as in build_tactics), one step applied.
/// A state whose simulated size reaches zero keeps a pure-retention
/// column (warning) but may still receive flows.
Trajectory simulate_dynamic(const PanelData& panel, int start_year, int end_year,
                            const Parameters& params,
                            FractionDenominator denominator = FractionDenominator::Simulated);

/// Per-year sum of the member countries' sizes.
std::vector<double> coalition_power(const Trajectory& trajectory,
                                    const std::vector<std::string>& members);

struct BacktestReport {
    CountryRegistry registry;
    std::vector<int> years;
    Eigen::MatrixXd predicted;
    Eigen::MatrixXd actual;
    std::vector<double> year_distance;  // Euclidean distance per year
    std::vector<double> country_mare;   // mean absolute relative error per country
    std::vector<std::string> warnings;
};

/// Dynamic simulation compared against the recorded wealth, year by year.
BacktestReport backtest(const PanelData& panel, const Parameters& params, int start_year,
                        int end_year,
                        FractionDenominator denominator = FractionDenominator::Simulated);

}  // namespace powerflow

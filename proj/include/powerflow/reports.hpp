#pragma once

#include "powerflow/calibration.hpp"
#include "powerflow/csv.hpp"
#include "powerflow/panel.hpp"
#include "powerflow/simulation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace powerflow {

/// `year,country,size` rows, year-major, countries in registry order.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// Dense matrix with country codes on both axes.
void write_matrix_csv(const std::filesystem::path& path, const CountryRegistry& registry,
                      const Eigen::MatrixXd& matrix);

/// Reads a matrix written by write_matrix_csv. The header order is
/// preserved; pass `registry_out` to recover it.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* header_out = nullptr);

struct GraphExport {
    enum class EdgeRule { PrimaryPartner, Full };
    struct Node {
        std::string code;
        double size = 0;
    };
    struct Edge {
        std::string from;
        std::string to;
        double weight = 0;
    };
    EdgeRule rule = EdgeRule::PrimaryPartner;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
};

/// Primary-partner rule: one edge per country to its largest trade
/// partner by total dyadic volume, ties broken toward the
/// lexicographically smaller code. Full rule: every nonzero directed
/// effective flow.
GraphExport build_graph(const PanelData& panel, int year, const SizeVector& sizes,
                        GraphExport::EdgeRule rule);

void write_graph_dot(const std::filesystem::path& path, const GraphExport& graph);

void write_mu_report_csv(const std::filesystem::path& path, const MuEstimate& estimate);
void write_growth_fit_csv(const std::filesystem::path& path, const GrowthFit& fit);
void write_beta_curve_csv(const std::filesystem::path& path, const BetaFit& fit);

/// `kind,key,value` rows: one year_distance row per year followed by
/// one country_mare row per country.
void write_backtest_metrics_csv(const std::filesystem::path& path, const BacktestReport& report);

}  // namespace powerflow

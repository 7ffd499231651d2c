#include "powerflow/reports.hpp"

#include <fstream>
#include <stdexcept>

namespace powerflow {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    auto out = open_out(path);
    out << "year,country,size\n";
    for (size_t row = 0; row < trajectory.years.size(); ++row) {
        for (int i = 0; i < trajectory.registry.size(); ++i) {
            out << trajectory.years[row] << ',' << trajectory.registry.code(i) << ','
                << format_double(trajectory.sizes(static_cast<Eigen::Index>(row), i)) << '\n';
        }
    }
}

void write_matrix_csv(const std::filesystem::path& path, const CountryRegistry& registry,
                      const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != registry.size() || matrix.cols() != registry.size()) {
        throw std::invalid_argument("matrix dimensions do not match the registry");
    }
    auto out = open_out(path);
    out << "country";
    for (const auto& code : registry.codes()) {
        out << ',' << code;
    }
    out << '\n';
    for (int i = 0; i < registry.size(); ++i) {
        out << registry.code(i);
        for (int j = 0; j < registry.size(); ++j) {
            out << ',' << format_double(matrix(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* header_out) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string(), 1, "missing header row");
    }
    auto header = split_csv_line(strip_cr(line));
    if (header.empty() || header[0] != "country") {
        throw ParseError(path.string(), 1, "matrix header must start with 'country'");
    }
    header.erase(header.begin());
    const auto n = static_cast<Eigen::Index>(header.size());

    Eigen::MatrixXd matrix(n, n);
    int lineno = 1;
    Eigen::Index row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = split_csv_line(strip_cr(line));
        if (fields.size() != header.size() + 1) {
            throw ParseError(path.string(), lineno, "wrong field count");
        }
        if (row >= n) {
            throw ParseError(path.string(), lineno, "more rows than header columns");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            double value = 0;
            if (!parse_double(fields[static_cast<size_t>(j) + 1], value)) {
                throw ParseError(path.string(), lineno, "invalid number '" +
                                                            fields[static_cast<size_t>(j) + 1] + "'");
            }
            matrix(row, j) = value;
        }
        ++row;
    }
    if (row != n) {
        throw ParseError(path.string(), lineno, "expected " + std::to_string(n) + " rows");
    }
    if (header_out) {
        *header_out = std::move(header);
    }
    return matrix;
}

GraphExport build_graph(const PanelData& panel, int year, const SizeVector& sizes,
                        GraphExport::EdgeRule rule) {
    const int n = panel.registry.size();
    if (sizes.size() != n) {
        throw std::invalid_argument("sizes length does not match the registry");
    }
    GraphExport graph;
    graph.rule = rule;
    for (int i = 0; i < n; ++i) {
        graph.nodes.push_back({panel.registry.code(i), sizes[i]});
    }
    if (rule == GraphExport::EdgeRule::Full) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                const double flow =
                    panel.trade_effective(panel.registry.code(j), panel.registry.code(i), year);
                if (flow > 0.0) {
                    graph.edges.push_back({panel.registry.code(j), panel.registry.code(i), flow});
                }
            }
        }
        return graph;
    }
    for (int j = 0; j < n; ++j) {
        int best = -1;
        double best_volume = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            const double volume =
                panel.trade_effective(panel.registry.code(j), panel.registry.code(i), year) +
                panel.trade_effective(panel.registry.code(i), panel.registry.code(j), year);
            // strict > keeps the first (lexicographically smaller) code on ties
            if (volume > best_volume) {
                best_volume = volume;
                best = i;
            }
        }
        if (best >= 0) {
            graph.edges.push_back({panel.registry.code(j), panel.registry.code(best), best_volume});
        }
    }
    return graph;
}

void write_graph_dot(const std::filesystem::path& path, const GraphExport& graph) {
    auto out = open_out(path);
    out << "digraph power_structure {\n";
    for (const auto& node : graph.nodes) {
        out << "  " << node.code << " [size=" << format_double(node.size) << "];\n";
    }
    for (const auto& edge : graph.edges) {
        out << "  " << edge.from << " -> " << edge.to << " [weight=" << format_double(edge.weight)
            << "];\n";
    }
    out << "}\n";
}

void write_mu_report_csv(const std::filesystem::path& path, const MuEstimate& estimate) {
    auto out = open_out(path);
    out << "country,year,expected,actual,loss,x,mu\n";
    for (const auto& r : estimate.records) {
        out << r.country << ',' << r.year << ',' << format_double(r.expected) << ','
            << format_double(r.actual) << ',' << format_double(r.loss) << ','
            << format_double(r.x) << ',' << format_double(r.mu) << '\n';
    }
}

void write_growth_fit_csv(const std::filesystem::path& path, const GrowthFit& fit) {
    auto out = open_out(path);
    out << "intercept,slope,n,rss\n";
    out << format_double(fit.intercept) << ',' << format_double(fit.slope) << ',' << fit.n << ','
        << format_double(fit.rss) << '\n';
}

void write_beta_curve_csv(const std::filesystem::path& path, const BetaFit& fit) {
    auto out = open_out(path);
    out << "beta,objective\n";
    for (const auto& [beta, objective] : fit.curve) {
        out << format_double(beta) << ',' << format_double(objective) << '\n';
    }
}

void write_backtest_metrics_csv(const std::filesystem::path& path, const BacktestReport& report) {
    auto out = open_out(path);
    out << "kind,key,value\n";
    for (size_t row = 0; row < report.years.size(); ++row) {
        out << "year_distance," << report.years[row] << ','
            << format_double(report.year_distance[row]) << '\n';
    }
    for (int i = 0; i < report.registry.size(); ++i) {
        out << "country_mare," << report.registry.code(i) << ','
            << format_double(report.country_mare[static_cast<size_t>(i)]) << '\n';
    }
}

}  // namespace powerflow

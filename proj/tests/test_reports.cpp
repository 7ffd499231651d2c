#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "powerflow/reports.hpp"
#include "powerflow/simulation.hpp"

#include <random>

using namespace powerflow;
using testutil::make_temp_dir;
using testutil::read_file;

TEST_CASE("format_double: shortest form that round-trips exactly") {
    CHECK(format_double(102.5) == "102.5");
    CHECK(format_double(105.0625) == "105.0625");
    CHECK(format_double(100.0) == "100");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "0");

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-30, 30);
    for (int round = 0; round < 2000; ++round) {
        const double value = mantissa(rng) * std::pow(10.0, exponent(rng));
        double back = 0;
        REQUIRE(parse_double(format_double(value), back));
        CHECK(back == value);
    }
}

TEST_CASE("trajectory csv layout") {
    Trajectory trajectory;
    trajectory.registry = CountryRegistry({"AAB", "AAA"});
    trajectory.years = {2020, 2021};
    trajectory.sizes.resize(2, 2);
    trajectory.sizes << 1.0, 2.0, 3.5, 4.25;
    const auto dir = make_temp_dir("trajcsv");
    write_trajectory_csv(dir / "t.csv", trajectory);
    CHECK(read_file(dir / "t.csv") ==
          "year,country,size\n"
          "2020,AAA,1\n"
          "2020,AAB,2\n"
          "2021,AAA,3.5\n"
          "2021,AAB,4.25\n");
}

TEST_CASE("matrix csv round-trips bit-exactly") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> unit(-3.0, 3.0);
    const int n = 5;
    const CountryRegistry registry(testutil::make_codes(n));
    Eigen::MatrixXd matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            matrix(i, j) = unit(rng) / 3.0;
        }
    }
    const auto dir = make_temp_dir("matrixcsv");
    write_matrix_csv(dir / "m.csv", registry, matrix);

    std::vector<std::string> header;
    const Eigen::MatrixXd back = read_matrix_csv(dir / "m.csv", &header);
    CHECK(header == registry.codes());
    CHECK((back - matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("primary-partner graph: symmetric fixture and tie-breaks") {
    PanelData panel = testutil::skeleton_panel({"AAA", "AAB"}, 2020, 2020);
    panel.wealth[{"AAA", 2020}] = 100.0;
    panel.wealth[{"AAB", 2020}] = 50.0;
    panel.trade[{"AAA", "AAB", 2020}] = 7.0;
    panel.trade[{"AAB", "AAA", 2020}] = 7.0;

    const GraphExport graph =
        build_graph(panel, 2020, sizes_at(panel, 2020), GraphExport::EdgeRule::PrimaryPartner);
    REQUIRE(graph.nodes.size() == 2);
    REQUIRE(graph.edges.size() == 2);
    CHECK(graph.edges[0].from == "AAA");
    CHECK(graph.edges[0].to == "AAB");
    CHECK(graph.edges[1].from == "AAB");
    CHECK(graph.edges[1].to == "AAA");
    CHECK(graph.edges[0].weight == doctest::Approx(14.0));

    const auto dir = make_temp_dir("dot");
    write_graph_dot(dir / "g.dot", graph);
    CHECK(read_file(dir / "g.dot") ==
          "digraph power_structure {\n"
          "  AAA [size=100];\n"
          "  AAB [size=50];\n"
          "  AAA -> AAB [weight=14];\n"
          "  AAB -> AAA [weight=14];\n"
          "}\n");

    SUBCASE("equal flows to two partners pick the smaller code") {
        PanelData tie = testutil::skeleton_panel({"AAC", "AAD", "AAE"}, 2020, 2020);
        for (const auto& code : tie.registry.codes()) {
            tie.wealth[{code, 2020}] = 10.0;
        }
        tie.trade[{"AAE", "AAC", 2020}] = 5.0;
        tie.trade[{"AAE", "AAD", 2020}] = 5.0;
        tie.trade[{"AAC", "AAE", 2020}] = 0.0;
        tie.trade[{"AAD", "AAE", 2020}] = 0.0;
        const GraphExport g =
            build_graph(tie, 2020, sizes_at(tie, 2020), GraphExport::EdgeRule::PrimaryPartner);
        for (const auto& edge : g.edges) {
            if (edge.from == "AAE") {
                CHECK(edge.to == "AAC");
            }
        }
    }
}

TEST_CASE("primary-partner graph: out-degree is one exactly for trading nodes") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 20; ++round) {
        const int n = 3 + static_cast<int>(unit(rng) * 4);
        PanelData panel = testutil::skeleton_panel(testutil::make_codes(n), 2020, 2020);
        for (int i = 0; i < n; ++i) {
            panel.wealth[{panel.registry.code(i), 2020}] = 10.0 + 90.0 * unit(rng);
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (i != j && unit(rng) < 0.4) {
                    panel.trade[{panel.registry.code(j), panel.registry.code(i), 2020}] =
                        unit(rng) < 0.1 ? 0.0 : 5.0 * unit(rng);
                }
            }
        }
        const GraphExport graph =
            build_graph(panel, 2020, sizes_at(panel, 2020), GraphExport::EdgeRule::PrimaryPartner);
        for (int j = 0; j < n; ++j) {
            const auto& code = panel.registry.code(j);
            int out_degree = 0;
            for (const auto& edge : graph.edges) {
                out_degree += edge.from == code;
            }
            CHECK(out_degree <= 1);
            const bool trades = panel.trade_volume(code, 2020) > 0.0;
            CHECK(out_degree == (trades ? 1 : 0));
        }
    }
}

TEST_CASE("full-rule graph lists every nonzero effective flow") {
    PanelData panel = testutil::skeleton_panel({"AAA", "AAB", "AAC"}, 2020, 2020);
    for (const auto& code : panel.registry.codes()) {
        panel.wealth[{code, 2020}] = 10.0;
    }
    panel.trade[{"AAA", "AAB", 2020}] = 1.0;  // mirrored into AAB -> AAA as well
    const GraphExport graph =
        build_graph(panel, 2020, sizes_at(panel, 2020), GraphExport::EdgeRule::Full);
    CHECK(graph.edges.size() == 2);
}

TEST_CASE("calibration report writers") {
    const auto dir = make_temp_dir("calreports");

    MuEstimate estimate;
    estimate.records.push_back({"AAA", 2011, 100.0, 69.0, 31.0, 1.0, 30.0});
    estimate.raw_mean = estimate.trimmed_mean = 30.0;
    estimate.count = estimate.trimmed_count = 1;
    write_mu_report_csv(dir / "mu.csv", estimate);
    CHECK(read_file(dir / "mu.csv") ==
          "country,year,expected,actual,loss,x,mu\n"
          "AAA,2011,100,69,31,1,30\n");

    GrowthFit fit;
    fit.intercept = 1.025;
    fit.slope = 0.201;
    fit.n = 12;
    fit.rss = 0.0;
    write_growth_fit_csv(dir / "growth.csv", fit);
    CHECK(read_file(dir / "growth.csv") == "intercept,slope,n,rss\n1.025,0.201,12,0\n");

    BetaFit beta;
    beta.curve = {{1.1, 0.5}, {1.2, 0.25}};
    write_beta_curve_csv(dir / "beta.csv", beta);
    CHECK(read_file(dir / "beta.csv") == "beta,objective\n1.1,0.5\n1.2,0.25\n");
}

TEST_CASE("backtest metrics writer") {
    BacktestReport report;
    report.registry = CountryRegistry({"AAA", "AAB"});
    report.years = {2000, 2001};
    report.year_distance = {0.0, 1.5};
    report.country_mare = {0.01, 0.02};
    const auto dir = make_temp_dir("btmetrics");
    write_backtest_metrics_csv(dir / "m.csv", report);
    CHECK(read_file(dir / "m.csv") ==
          "kind,key,value\n"
          "year_distance,2000,0\n"
          "year_distance,2001,1.5\n"
          "country_mare,AAA,0.01\n"
          "country_mare,AAB,0.02\n");
}

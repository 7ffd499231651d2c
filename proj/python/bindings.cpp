#include "powerflow/calibration.hpp"
#include "powerflow/core.hpp"
#include "powerflow/csv.hpp"
#include "powerflow/panel.hpp"
#include "powerflow/reports.hpp"
#include "powerflow/scenario.hpp"
#include "powerflow/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace powerflow;

namespace {

std::vector<std::string> violation_messages(const ValidationReport& report) {
    std::vector<std::string> messages;
    messages.reserve(report.size());
    for (const auto& v : report) {
        messages.push_back(v.message);
    }
    return messages;
}

}  // namespace

PYBIND11_MODULE(_powerflow, m) {
    m.doc() = "National power modeled as wealth flowing through trade and conflict networks";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<CountryRegistry>(m, "CountryRegistry")
        .def(py::init<std::vector<std::string>>(), py::arg("codes"))
        .def_property_readonly("codes", &CountryRegistry::codes)
        .def("__len__", &CountryRegistry::size)
        .def("index_of", &CountryRegistry::index_of, py::arg("code"))
        .def("contains", &CountryRegistry::contains, py::arg("code"))
        .def("__repr__", [](const CountryRegistry& r) {
            return "CountryRegistry(" + std::to_string(r.size()) + " countries)";
        });

    py::class_<TacticMatrix>(m, "TacticMatrix")
        .def(py::init<>())
        .def_static("pure_retention", &TacticMatrix::pure_retention, py::arg("n"))
        .def_readwrite("constructive", &TacticMatrix::constructive)
        .def_readwrite("destructive", &TacticMatrix::destructive)
        .def_readwrite("retained", &TacticMatrix::retained)
        .def("combined", &TacticMatrix::combined, py::arg("beta"), py::arg("mu"),
             py::arg("lambda_"));

    py::class_<Parameters>(m, "Parameters")
        .def(py::init([](double beta, double mu, double lambda_) {
                 Parameters p;
                 p.beta = beta;
                 p.mu = mu;
                 p.lambda = lambda_;
                 return p;
             }),
             py::arg("beta") = 1.392, py::arg("mu") = 30.0, py::arg("lambda_") = 1.025)
        .def_readwrite("beta", &Parameters::beta)
        .def_readwrite("mu", &Parameters::mu)
        .def_readwrite("lambda_", &Parameters::lambda)
        .def_readwrite("beta_by_country", &Parameters::beta_by_country)
        .def_readwrite("lambda_by_country", &Parameters::lambda_by_country)
        .def("require_model_ranges", &Parameters::require_model_ranges)
        .def("__repr__", [](const Parameters& p) {
            return "Parameters(beta=" + format_double(p.beta) + ", mu=" + format_double(p.mu) +
                   ", lambda_=" + format_double(p.lambda) + ")";
        });

    py::class_<PowerStructure>(m, "PowerStructure")
        .def(py::init<CountryRegistry, SizeVector, TacticMatrix>(), py::arg("registry"),
             py::arg("sizes"), py::arg("tactics"))
        .def_readwrite("registry", &PowerStructure::registry)
        .def_readwrite("sizes", &PowerStructure::sizes)
        .def_readwrite("tactics", &PowerStructure::tactics);

    m.def(
        "validate",
        [](const PowerStructure& ps) { return violation_messages(validate(ps)); },
        py::arg("power_structure"), "Invariant violations as strings; empty means valid");
    m.def("step", &step, py::arg("power_structure"), py::arg("params"),
          py::arg("self_destruction") = std::nullopt);
    m.def("constructive_delta", &constructive_delta, py::arg("x"), py::arg("beta"));
    m.def("destructive_delta", &destructive_delta, py::arg("x"), py::arg("mu"));

    py::class_<PanelData>(m, "PanelData")
        .def_readonly("registry", &PanelData::registry)
        .def_readonly("first_year", &PanelData::first_year)
        .def_readonly("last_year", &PanelData::last_year)
        .def("wealth_at", &PanelData::wealth_at, py::arg("country"), py::arg("year"))
        .def("milex_at", &PanelData::milex_at, py::arg("country"), py::arg("year"))
        .def("conflict_between", &PanelData::conflict_between, py::arg("aggressor"),
             py::arg("target"), py::arg("year"))
        .def("trade_reported", &PanelData::trade_reported, py::arg("from_country"),
             py::arg("to_country"), py::arg("year"))
        .def("trade_effective", &PanelData::trade_effective, py::arg("from_country"),
             py::arg("to_country"), py::arg("year"))
        .def("trade_volume", &PanelData::trade_volume, py::arg("country"), py::arg("year"))
        .def("__eq__", [](const PanelData& a, const PanelData& b) { return a == b; });

    m.def(
        "load_panel",
        [](const std::filesystem::path& dir) { return load_panel(PanelPaths::in_directory(dir)); },
        py::arg("data_dir"), "Load wealth/trade/milex/conflicts CSVs from a directory");
    m.def(
        "save_panel",
        [](const PanelData& panel, const std::filesystem::path& dir) {
            save_panel(panel, PanelPaths::in_directory(dir));
        },
        py::arg("panel"), py::arg("data_dir"));
    m.def("sizes_at", &sizes_at, py::arg("panel"), py::arg("year"));

    py::enum_<ZeroSizePolicy>(m, "ZeroSizePolicy")
        .value("Error", ZeroSizePolicy::Error)
        .value("WarnRetain", ZeroSizePolicy::WarnRetain);

    py::class_<TacticBuild>(m, "TacticBuild")
        .def_readonly("matrix", &TacticBuild::matrix)
        .def_readonly("warnings", &TacticBuild::warnings);

    m.def("build_tactics", &build_tactics, py::arg("panel"), py::arg("year"), py::arg("sizes"),
          py::arg("policy") = ZeroSizePolicy::Error);
    m.def("civil_war_diagonal", &civil_war_diagonal, py::arg("panel"), py::arg("year"),
          py::arg("sizes"), py::arg("policy") = ZeroSizePolicy::Error);

    m.def("peacetime_growth", &peacetime_growth, py::arg("wealth_by_year"), py::arg("war_years"));

    py::class_<Episode>(m, "Episode")
        .def(py::init([](std::string country, std::set<int> war_years) {
                 return Episode{std::move(country), std::move(war_years)};
             }),
             py::arg("country"), py::arg("war_years"))
        .def_readwrite("country", &Episode::country)
        .def_readwrite("war_years", &Episode::war_years);

    m.def("episodes_from_conflicts", &episodes_from_conflicts, py::arg("panel"));

    py::class_<MuRecord>(m, "MuRecord")
        .def_readonly("country", &MuRecord::country)
        .def_readonly("year", &MuRecord::year)
        .def_readonly("expected", &MuRecord::expected)
        .def_readonly("actual", &MuRecord::actual)
        .def_readonly("loss", &MuRecord::loss)
        .def_readonly("x", &MuRecord::x)
        .def_readonly("mu", &MuRecord::mu);

    py::class_<MuEstimate>(m, "MuEstimate")
        .def_readonly("records", &MuEstimate::records)
        .def_readonly("raw_mean", &MuEstimate::raw_mean)
        .def_readonly("trimmed_mean", &MuEstimate::trimmed_mean)
        .def_readonly("count", &MuEstimate::count)
        .def_readonly("trimmed_count", &MuEstimate::trimmed_count);

    m.def("estimate_mu", &estimate_mu, py::arg("panel"), py::arg("episodes"));

    py::class_<GrowthObservation>(m, "GrowthObservation")
        .def_readonly("country", &GrowthObservation::country)
        .def_readonly("year", &GrowthObservation::year)
        .def_readonly("growth", &GrowthObservation::growth)
        .def_readonly("trade_percentage", &GrowthObservation::trade_percentage);

    py::class_<GrowthFit>(m, "GrowthFit")
        .def_readonly("intercept", &GrowthFit::intercept)
        .def_readonly("slope", &GrowthFit::slope)
        .def_readonly("n", &GrowthFit::n)
        .def_readonly("rss", &GrowthFit::rss)
        .def_readonly("observations", &GrowthFit::observations);

    m.def("fit_growth_regression", &fit_growth_regression, py::arg("panel"));

    py::class_<BetaGrid>(m, "BetaGrid")
        .def(py::init([](double lo, double hi, double step) {
                 return BetaGrid{lo, hi, step};
             }),
             py::arg("lo") = 1.001, py::arg("hi") = 2.0, py::arg("step") = 0.001)
        .def_readwrite("lo", &BetaGrid::lo)
        .def_readwrite("hi", &BetaGrid::hi)
        .def_readwrite("step", &BetaGrid::step);

    py::class_<BetaFit>(m, "BetaFit")
        .def_readonly("best_beta", &BetaFit::best_beta)
        .def_readonly("objective", &BetaFit::objective)
        .def_readonly("curve", &BetaFit::curve)
        .def_readonly("warnings", &BetaFit::warnings);

    m.def("fit_beta", &fit_beta, py::arg("panel"), py::arg("lambda_"), py::arg("mu"),
          py::arg("grid") = BetaGrid{});

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("registry", &Trajectory::registry)
        .def_readonly("years", &Trajectory::years)
        .def_readonly("sizes", &Trajectory::sizes)
        .def_readonly("warnings", &Trajectory::warnings);

    py::enum_<FractionDenominator>(m, "FractionDenominator")
        .value("Simulated", FractionDenominator::Simulated)
        .value("Actual", FractionDenominator::Actual);

    m.def("simulate_naive", &simulate_naive, py::arg("panel"), py::arg("base_year"),
          py::arg("n_years"), py::arg("params"));
    m.def("simulate_dynamic", &simulate_dynamic, py::arg("panel"), py::arg("start_year"),
          py::arg("end_year"), py::arg("params"),
          py::arg("denominator") = FractionDenominator::Simulated);
    m.def("coalition_power", &coalition_power, py::arg("trajectory"), py::arg("members"));

    py::class_<BacktestReport>(m, "BacktestReport")
        .def_readonly("registry", &BacktestReport::registry)
        .def_readonly("years", &BacktestReport::years)
        .def_readonly("predicted", &BacktestReport::predicted)
        .def_readonly("actual", &BacktestReport::actual)
        .def_readonly("year_distance", &BacktestReport::year_distance)
        .def_readonly("country_mare", &BacktestReport::country_mare)
        .def_readonly("warnings", &BacktestReport::warnings);

    m.def("backtest", &backtest, py::arg("panel"), py::arg("params"), py::arg("start_year"),
          py::arg("end_year"), py::arg("denominator") = FractionDenominator::Simulated);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("base_year", &Scenario::base_year)
        .def_readonly("horizon", &Scenario::horizon)
        .def("__repr__", [](const Scenario& s) {
            return "Scenario('" + s.name + "', base_year=" + std::to_string(s.base_year) +
                   ", horizon=" + std::to_string(s.horizon) + ", " +
                   std::to_string(s.edits.size()) + " edits)";
        });

    m.def("parse_scenario", &parse_scenario, py::arg("json_text"),
          py::arg("origin") = "<scenario>");
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("apply_scenario", &apply_scenario, py::arg("panel"), py::arg("scenario"));

    m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("path"), py::arg("trajectory"));
    m.def("format_double", &format_double, py::arg("value"));

#ifdef POWERFLOW_VERSION
    m.attr("__version__") = POWERFLOW_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}

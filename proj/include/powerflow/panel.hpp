#pragma once

#include "powerflow/core.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace powerflow {

/// A CSV (or other input) failure with position information.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, int line, const std::string& reason);
    const std::string& file() const { return file_; }
    int line() const { return line_; }

private:
    std::string file_;
    int line_;
};

using CountryYearKey = std::pair<std::string, int>;
using FlowKey = std::tuple<std::string, std::string, int>;  // from, to, year

/// The four yearly panels. All monetary values are billions of
/// constant-2020 USD; ingestion performs no currency conversion.
struct PanelData {
    CountryRegistry registry;
    std::map<CountryYearKey, double> wealth;
    std::map<FlowKey, double> trade;  // reporter's exports to partner
    std::map<CountryYearKey, double> milex;
    std::map<FlowKey, double> conflicts;  // aggressor == target encodes civil war
    int first_year = 0;
    int last_year = 0;

    std::optional<double> wealth_at(const std::string& country, int year) const;
    std::optional<double> milex_at(const std::string& country, int year) const;
    double conflict_between(const std::string& aggressor, const std::string& target,
                            int year) const;

    /// Reported directed flow; zero when the row is absent.
    double trade_reported(const std::string& from, const std::string& to, int year) const;

    /// Directed flow with the missing direction of a dyad mirrored from
    /// the partner's report (CIF import reports stand in for the other
    /// side's exports). A reported row, even a zero one, is never
    /// overridden.
    double trade_effective(const std::string& from, const std::string& to, int year) const;

    /// Effective exports plus imports of a country in a year.
    double trade_volume(const std::string& country, int year) const;

    /// Wealth series of one country, keyed by year.
    std::map<int, double> wealth_series(const std::string& country) const;

    /// True when the country appears in any conflict row for the year,
    /// on either side, including civil war.
    bool at_war(const std::string& country, int year) const;

    /// New panel containing only rows whose countries are all in `kept`.
    PanelData restricted_to(const std::set<std::string>& kept) const;

    bool operator==(const PanelData&) const = default;
};

struct PanelPaths {
    std::filesystem::path wealth;
    std::filesystem::path trade;
    std::filesystem::path milex;
    std::filesystem::path conflicts;

    static PanelPaths in_directory(const std::filesystem::path& dir);
};

/// Loads and validates the four CSVs. The registry becomes the sorted
/// union of all country codes seen in any file.
PanelData load_panel(const PanelPaths& paths);
void save_panel(const PanelData& panel, const PanelPaths& paths);

struct PanelSubset {
    PanelData panel;
    std::vector<std::string> warnings;
};

/// Removes countries lacking wealth in `year` (one warning each). The
/// reduced registry then stays fixed for the rest of the run.
PanelSubset drop_missing_wealth(const PanelData& panel, int year);

/// Wealth of every registry country in `year`; throws when absent.
SizeVector sizes_at(const PanelData& panel, int year);

enum class ZeroSizePolicy {
    Error,       // a zero/missing-size state that originates flows is an error
    WarnRetain,  // record a warning and give that state a pure-retention column
};

struct TacticBuild {
    TacticMatrix matrix;
    std::vector<std::string> warnings;
};

/// Converts one year's absolute flows into allocation fractions of
/// `sizes`. Destructive columns are capped at milex/size where military
/// expenditure data exists; columns allocating more than the full stock
/// are rescaled proportionally onto the simplex (warning recorded).
TacticBuild build_tactics(const PanelData& panel, int year, const SizeVector& sizes,
                          ZeroSizePolicy policy = ZeroSizePolicy::Error);

/// Civil-war expenditure of each state as a fraction of its size.
/// Consumed by step() as the explicit self-destruction adjustment and
/// by the mu calibration.
Eigen::VectorXd civil_war_diagonal(const PanelData& panel, int year, const SizeVector& sizes,
                                   ZeroSizePolicy policy = ZeroSizePolicy::Error);

}  // namespace powerflow

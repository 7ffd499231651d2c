#pragma once

#include "powerflow/panel.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace powerflow {

struct YearSpan {
    int from_year = 0;
    int to_year = 0;  // inclusive
};

enum class TradeScope { Dyad, CountryAll, CoalitionPair };

struct SetConflictEdit {
    std::string aggressor;
    std::string target;  // equal to aggressor for civil war
    YearSpan years;
    double annual_expenditure = 0;
};

struct RemoveConflictEdit {
    std::string aggressor;
    std::string target;
    YearSpan years;
};

struct ScaleTradeEdit {
    TradeScope scope = TradeScope::Dyad;
    std::string country_a;  // Dyad and CountryAll
    std::string country_b;  // Dyad only
    std::vector<std::string> coalition_a;  // CoalitionPair only
    std::vector<std::string> coalition_b;
    YearSpan years;
    double factor = 1.0;
};

/// Moves `fraction` of each member's exports to the opposing coalition
/// onto its own coalition, pro rata to existing intra-coalition flows
/// (uniform split when there are none). Applied symmetrically to both
/// coalitions and to every panel year; each country's total outflow is
/// preserved.
struct ReallocateTradeEdit {
    std::vector<std::string> coalition_a;
    std::vector<std::string> coalition_b;
    double fraction = 0;  // in [0, 1]
};

/// Assistance modeled as a constructive flow: the recipient gains
/// beta times the amount under the law of motion.
struct TransferEdit {
    std::string donor;
    std::string recipient;
    int year = 0;
    double amount = 0;
};

using ScenarioEdit = std::variant<SetConflictEdit, RemoveConflictEdit, ScaleTradeEdit,
                                  ReallocateTradeEdit, TransferEdit>;

struct Scenario {
    std::string name;
    int base_year = 0;
    int horizon = 0;  // years simulated past base_year
    std::vector<ScenarioEdit> edits;
};

/// Parses the JSON scenario document; structural problems (unknown
/// kind, missing field, out-of-range factor, span outside the horizon)
/// raise ParseError.
Scenario parse_scenario(const std::string& json_text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Applies the edits in order to a copy of the panel; the input panel
/// is untouched. Unknown countries and overlapping coalitions raise
/// std::invalid_argument.
PanelData apply_scenario(const PanelData& panel, const Scenario& scenario);

}  // namespace powerflow

#include "powerflow/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace powerflow {

namespace {

using nlohmann::json;

YearSpan parse_span(const json& edit, const std::string& origin, const std::string& where) {
    if (!edit.contains("from_year") || !edit.contains("to_year")) {
        throw ParseError(origin, 0, where + ": missing from_year/to_year");
    }
    YearSpan span{edit.at("from_year").get<int>(), edit.at("to_year").get<int>()};
    if (span.from_year > span.to_year) {
        throw ParseError(origin, 0, where + ": from_year exceeds to_year");
    }
    return span;
}

std::vector<std::string> parse_members(const json& edit, const char* field,
                                       const std::string& origin, const std::string& where) {
    if (!edit.contains(field) || !edit.at(field).is_array() || edit.at(field).empty()) {
        throw ParseError(origin, 0, where + ": " + field + " must be a non-empty array");
    }
    std::vector<std::string> members;
    for (const auto& m : edit.at(field)) {
        members.push_back(m.get<std::string>());
    }
    return members;
}

void check_within_horizon(const Scenario& scenario, int from_year, int to_year,
                          const std::string& origin, const std::string& where) {
    const int last = scenario.base_year + scenario.horizon;
    if (from_year < scenario.base_year || to_year > last) {
        throw ParseError(origin, 0,
                         where + ": years " + std::to_string(from_year) + ".." +
                             std::to_string(to_year) + " fall outside " +
                             std::to_string(scenario.base_year) + ".." + std::to_string(last));
    }
}

ScenarioEdit parse_edit(const json& edit, const Scenario& scenario, size_t position,
                        const std::string& origin) {
    const std::string where = "edit " + std::to_string(position);
    if (!edit.contains("kind")) {
        throw ParseError(origin, 0, where + ": missing kind");
    }
    const std::string kind = edit.at("kind").get<std::string>();

    if (kind == "set_conflict") {
        SetConflictEdit e;
        e.aggressor = edit.at("aggressor").get<std::string>();
        e.target = edit.at("target").get<std::string>();
        e.years = parse_span(edit, origin, where);
        e.annual_expenditure = edit.at("expenditure").get<double>();
        if (e.annual_expenditure < 0) {
            throw ParseError(origin, 0, where + ": negative expenditure");
        }
        check_within_horizon(scenario, e.years.from_year, e.years.to_year, origin, where);
        return e;
    }
    if (kind == "remove_conflict") {
        RemoveConflictEdit e;
        e.aggressor = edit.at("aggressor").get<std::string>();
        e.target = edit.at("target").get<std::string>();
        e.years = parse_span(edit, origin, where);
        check_within_horizon(scenario, e.years.from_year, e.years.to_year, origin, where);
        return e;
    }
    if (kind == "scale_trade") {
        ScaleTradeEdit e;
        const std::string scope = edit.at("scope").get<std::string>();
        if (scope == "dyad") {
            e.scope = TradeScope::Dyad;
            e.country_a = edit.at("a").get<std::string>();
            e.country_b = edit.at("b").get<std::string>();
        } else if (scope == "country-all") {
            e.scope = TradeScope::CountryAll;
            e.country_a = edit.at("country").get<std::string>();
        } else if (scope == "coalition-pair") {
            e.scope = TradeScope::CoalitionPair;
            e.coalition_a = parse_members(edit, "coalition_a", origin, where);
            e.coalition_b = parse_members(edit, "coalition_b", origin, where);
        } else {
            throw ParseError(origin, 0, where + ": unknown scale_trade scope '" + scope + "'");
        }
        e.years = parse_span(edit, origin, where);
        e.factor = edit.at("factor").get<double>();
        if (e.factor < 0) {
            throw ParseError(origin, 0, where + ": negative factor");
        }
        check_within_horizon(scenario, e.years.from_year, e.years.to_year, origin, where);
        return e;
    }
    if (kind == "reallocate_trade") {
        ReallocateTradeEdit e;
        e.coalition_a = parse_members(edit, "coalition_a", origin, where);
        e.coalition_b = parse_members(edit, "coalition_b", origin, where);
        e.fraction = edit.at("fraction").get<double>();
        if (e.fraction < 0.0 || e.fraction > 1.0) {
            throw ParseError(origin, 0, where + ": fraction must be in [0, 1]");
        }
        return e;
    }
    if (kind == "transfer") {
        TransferEdit e;
        e.donor = edit.at("donor").get<std::string>();
        e.recipient = edit.at("recipient").get<std::string>();
        e.year = edit.at("year").get<int>();
        e.amount = edit.at("amount").get<double>();
        if (e.amount < 0) {
            throw ParseError(origin, 0, where + ": negative amount");
        }
        if (edit.contains("channel") && edit.at("channel").get<std::string>() != "constructive") {
            throw ParseError(origin, 0, where + ": only the constructive channel exists");
        }
        check_within_horizon(scenario, e.year, e.year, origin, where);
        return e;
    }
    throw ParseError(origin, 0, where + ": unknown kind '" + kind + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin, 0, e.what());
    }
    try {
        Scenario scenario;
        scenario.name = doc.at("name").get<std::string>();
        scenario.base_year = doc.at("base_year").get<int>();
        scenario.horizon = doc.at("horizon").get<int>();
        if (scenario.horizon < 0) {
            throw ParseError(origin, 0, "horizon must be non-negative");
        }
        for (size_t i = 0; i < doc.at("edits").size(); ++i) {
            scenario.edits.push_back(parse_edit(doc.at("edits")[i], scenario, i, origin));
        }
        return scenario;
    } catch (const json::exception& e) {
        throw ParseError(origin, 0, e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

namespace {

struct EditApplier {
    PanelData& panel;

    void require_known(const std::string& code) const {
        if (!panel.registry.contains(code)) {
            throw std::invalid_argument("scenario references unknown country " + code);
        }
    }

    void require_known(const std::vector<std::string>& codes) const {
        for (const auto& code : codes) require_known(code);
    }

    static void require_disjoint(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
        const std::set<std::string> set_a(a.begin(), a.end());
        for (const auto& code : b) {
            if (set_a.count(code)) {
                throw std::invalid_argument("coalitions overlap at " + code);
            }
        }
    }

    void operator()(const SetConflictEdit& e) const {
        require_known(e.aggressor);
        require_known(e.target);
        for (int y = e.years.from_year; y <= e.years.to_year; ++y) {
            panel.conflicts[{e.aggressor, e.target, y}] = e.annual_expenditure;
        }
    }

    void operator()(const RemoveConflictEdit& e) const {
        require_known(e.aggressor);
        require_known(e.target);
        for (int y = e.years.from_year; y <= e.years.to_year; ++y) {
            panel.conflicts.erase({e.aggressor, e.target, y});
        }
    }

    void operator()(const ScaleTradeEdit& e) const {
        std::set<std::string> members_a(e.coalition_a.begin(), e.coalition_a.end());
        std::set<std::string> members_b(e.coalition_b.begin(), e.coalition_b.end());
        if (e.scope == TradeScope::CoalitionPair) {
            require_known(e.coalition_a);
            require_known(e.coalition_b);
            require_disjoint(e.coalition_a, e.coalition_b);
        } else {
            require_known(e.country_a);
            if (e.scope == TradeScope::Dyad) require_known(e.country_b);
        }
        for (auto& [key, value] : panel.trade) {
            const int year = std::get<2>(key);
            if (year < e.years.from_year || year > e.years.to_year) continue;
            const std::string& from = std::get<0>(key);
            const std::string& to = std::get<1>(key);
            bool match = false;
            switch (e.scope) {
                case TradeScope::Dyad:
                    match = (from == e.country_a && to == e.country_b) ||
                            (from == e.country_b && to == e.country_a);
                    break;
                case TradeScope::CountryAll:
                    match = from == e.country_a || to == e.country_a;
                    break;
                case TradeScope::CoalitionPair:
                    match = (members_a.count(from) && members_b.count(to)) ||
                            (members_b.count(from) && members_a.count(to));
                    break;
            }
            if (match) value *= e.factor;
        }
    }

    void operator()(const ReallocateTradeEdit& e) const {
        require_known(e.coalition_a);
        require_known(e.coalition_b);
        require_disjoint(e.coalition_a, e.coalition_b);
        for (int year = panel.first_year; year <= panel.last_year; ++year) {
            reallocate_side(e.coalition_a, e.coalition_b, e.fraction, year);
            reallocate_side(e.coalition_b, e.coalition_a, e.fraction, year);
        }
    }

    void reallocate_side(const std::vector<std::string>& own,
                         const std::vector<std::string>& other, double fraction,
                         int year) const {
        if (own.size() < 2) {
            return;  // no intra-coalition recipients; moving flows would destroy them
        }
        for (const auto& member : own) {
            double moved = 0.0;
            for (const auto& opponent : other) {
                auto it = panel.trade.find({member, opponent, year});
                if (it == panel.trade.end() || it->second <= 0.0) continue;
                moved += it->second * fraction;
                it->second *= 1.0 - fraction;
            }
            if (moved <= 0.0) continue;

            double weight_sum = 0.0;
            std::vector<std::pair<std::string, double>> weights;
            for (const auto& ally : own) {
                if (ally == member) continue;
                const double w = panel.trade_reported(member, ally, year);
                weights.emplace_back(ally, w);
                weight_sum += w;
            }
            if (weight_sum > 0.0) {
                for (const auto& [ally, w] : weights) {
                    if (w > 0.0) panel.trade[{member, ally, year}] += moved * (w / weight_sum);
                }
            } else {
                for (const auto& [ally, w] : weights) {
                    (void)w;
                    panel.trade[{member, ally, year}] += moved / static_cast<double>(weights.size());
                }
            }
        }
    }

    void operator()(const TransferEdit& e) const {
        require_known(e.donor);
        require_known(e.recipient);
        if (e.donor == e.recipient) {
            throw std::invalid_argument("transfer donor equals recipient");
        }
        panel.trade[{e.donor, e.recipient, e.year}] += e.amount;
    }
};

}  // namespace

PanelData apply_scenario(const PanelData& panel, const Scenario& scenario) {
    PanelData edited = panel;
    for (const auto& edit : scenario.edits) {
        std::visit(EditApplier{edited}, edit);
    }
    return edited;
}

}  // namespace powerflow

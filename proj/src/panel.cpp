#include "powerflow/panel.hpp"

#include "powerflow/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

namespace powerflow {

ParseError::ParseError(std::string file, int line, const std::string& reason)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + reason),
      file_(std::move(file)),
      line_(line) {}

namespace {

bool is_country_code(const std::string& s) {
    return s.size() == 3 &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
    }
    return out;
}

std::string parse_code(const std::string& s, const std::string& file, int line,
                       const std::string& column) {
    if (!is_country_code(s)) {
        throw ParseError(file, line, column + " '" + s + "' is not an ISO-3166 alpha-3 code");
    }
    return s;
}

int parse_year_field(const std::string& s, const std::string& file, int line) {
    int year = 0;
    if (!parse_int(s, year)) {
        throw ParseError(file, line, "invalid year '" + s + "'");
    }
    return year;
}

double parse_amount(const std::string& s, const std::string& file, int line,
                    const std::string& column) {
    double value = 0;
    if (!parse_double(s, value)) {
        throw ParseError(file, line, "invalid " + column + " '" + s + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(file, line, column + " is not finite");
    }
    if (value < 0.0) {
        throw ParseError(file, line, "negative " + column + " (" + s + ")");
    }
    return value;
}

void for_each_row(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const std::function<void(const std::vector<std::string>&, int)>& fn) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string(), 1, "missing header row");
    }
    const auto fields = split_csv_line(strip_cr(line));
    if (fields != header) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i >= header.size() || fields[i] != header[i]) {
                throw ParseError(path.string(), 1,
                                 "unknown column '" + fields[i] + "' (expected header '" +
                                     join(header) + "')");
            }
        }
        throw ParseError(path.string(), 1, "missing columns (expected header '" + join(header) + "')");
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = strip_cr(line);
        if (row.empty()) {
            continue;
        }
        const auto f = split_csv_line(row);
        if (f.size() != header.size()) {
            throw ParseError(path.string(), lineno,
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(f.size()));
        }
        fn(f, lineno);
    }
}

}  // namespace

std::optional<double> PanelData::wealth_at(const std::string& country, int year) const {
    auto it = wealth.find({country, year});
    if (it == wealth.end()) return std::nullopt;
    return it->second;
}

std::optional<double> PanelData::milex_at(const std::string& country, int year) const {
    auto it = milex.find({country, year});
    if (it == milex.end()) return std::nullopt;
    return it->second;
}

double PanelData::conflict_between(const std::string& aggressor, const std::string& target,
                                   int year) const {
    auto it = conflicts.find({aggressor, target, year});
    return it == conflicts.end() ? 0.0 : it->second;
}

double PanelData::trade_reported(const std::string& from, const std::string& to, int year) const {
    auto it = trade.find({from, to, year});
    return it == trade.end() ? 0.0 : it->second;
}

double PanelData::trade_effective(const std::string& from, const std::string& to, int year) const {
    auto it = trade.find({from, to, year});
    if (it != trade.end()) {
        return it->second;
    }
    auto mirrored = trade.find({to, from, year});
    return mirrored == trade.end() ? 0.0 : mirrored->second;
}

double PanelData::trade_volume(const std::string& country, int year) const {
    double volume = 0.0;
    for (const auto& partner : registry.codes()) {
        if (partner == country) continue;
        volume += trade_effective(country, partner, year);
        volume += trade_effective(partner, country, year);
    }
    return volume;
}

std::map<int, double> PanelData::wealth_series(const std::string& country) const {
    std::map<int, double> series;
    for (auto it = wealth.lower_bound({country, std::numeric_limits<int>::min()});
         it != wealth.end() && it->first.first == country; ++it) {
        series.emplace(it->first.second, it->second);
    }
    return series;
}

bool PanelData::at_war(const std::string& country, int year) const {
    for (const auto& [key, value] : conflicts) {
        (void)value;
        if (std::get<2>(key) != year) continue;
        if (std::get<0>(key) == country || std::get<1>(key) == country) return true;
    }
    return false;
}

PanelData PanelData::restricted_to(const std::set<std::string>& kept) const {
    PanelData out;
    std::vector<std::string> codes(kept.begin(), kept.end());
    out.registry = CountryRegistry(std::move(codes));
    out.first_year = first_year;
    out.last_year = last_year;
    for (const auto& [key, value] : wealth) {
        if (kept.count(key.first)) out.wealth.emplace(key, value);
    }
    for (const auto& [key, value] : milex) {
        if (kept.count(key.first)) out.milex.emplace(key, value);
    }
    for (const auto& [key, value] : trade) {
        if (kept.count(std::get<0>(key)) && kept.count(std::get<1>(key))) {
            out.trade.emplace(key, value);
        }
    }
    for (const auto& [key, value] : conflicts) {
        if (kept.count(std::get<0>(key)) && kept.count(std::get<1>(key))) {
            out.conflicts.emplace(key, value);
        }
    }
    return out;
}

PanelPaths PanelPaths::in_directory(const std::filesystem::path& dir) {
    return {dir / "wealth.csv", dir / "trade.csv", dir / "milex.csv", dir / "conflicts.csv"};
}

PanelData load_panel(const PanelPaths& paths) {
    PanelData panel;
    std::set<std::string> codes;
    int min_year = std::numeric_limits<int>::max();
    int max_year = std::numeric_limits<int>::min();
    auto touch = [&](const std::string& code, int year) {
        codes.insert(code);
        min_year = std::min(min_year, year);
        max_year = std::max(max_year, year);
    };

    const std::string wealth_file = paths.wealth.string();
    for_each_row(paths.wealth, {"country", "year", "wealth"},
                 [&](const std::vector<std::string>& f, int line) {
                     const auto code = parse_code(f[0], wealth_file, line, "country");
                     const int year = parse_year_field(f[1], wealth_file, line);
                     const double value = parse_amount(f[2], wealth_file, line, "wealth");
                     if (!panel.wealth.emplace(CountryYearKey{code, year}, value).second) {
                         throw ParseError(wealth_file, line,
                                          "duplicate (country, year) key " + code + "," + f[1]);
                     }
                     touch(code, year);
                 });

    const std::string trade_file = paths.trade.string();
    for_each_row(paths.trade, {"reporter", "partner", "year", "flow"},
                 [&](const std::vector<std::string>& f, int line) {
                     const auto reporter = parse_code(f[0], trade_file, line, "reporter");
                     const auto partner = parse_code(f[1], trade_file, line, "partner");
                     if (reporter == partner) {
                         throw ParseError(trade_file, line, "reporter equals partner (" + reporter + ")");
                     }
                     const int year = parse_year_field(f[2], trade_file, line);
                     const double value = parse_amount(f[3], trade_file, line, "flow");
                     if (!panel.trade.emplace(FlowKey{reporter, partner, year}, value).second) {
                         throw ParseError(trade_file, line,
                                          "duplicate (reporter, partner, year) key " + reporter +
                                              "," + partner + "," + f[2]);
                     }
                     touch(reporter, year);
                     touch(partner, year);
                 });

    const std::string milex_file = paths.milex.string();
    for_each_row(paths.milex, {"country", "year", "expenditure"},
                 [&](const std::vector<std::string>& f, int line) {
                     const auto code = parse_code(f[0], milex_file, line, "country");
                     const int year = parse_year_field(f[1], milex_file, line);
                     const double value = parse_amount(f[2], milex_file, line, "expenditure");
                     if (!panel.milex.emplace(CountryYearKey{code, year}, value).second) {
                         throw ParseError(milex_file, line,
                                          "duplicate (country, year) key " + code + "," + f[1]);
                     }
                     touch(code, year);
                 });

    const std::string conflict_file = paths.conflicts.string();
    for_each_row(paths.conflicts, {"aggressor", "target", "year", "expenditure"},
                 [&](const std::vector<std::string>& f, int line) {
                     const auto aggressor = parse_code(f[0], conflict_file, line, "aggressor");
                     const auto target = parse_code(f[1], conflict_file, line, "target");
                     const int year = parse_year_field(f[2], conflict_file, line);
                     const double value = parse_amount(f[3], conflict_file, line, "expenditure");
                     if (!panel.conflicts.emplace(FlowKey{aggressor, target, year}, value).second) {
                         throw ParseError(conflict_file, line,
                                          "duplicate (aggressor, target, year) key " + aggressor +
                                              "," + target + "," + f[2]);
                     }
                     touch(aggressor, year);
                     touch(target, year);
                 });

    panel.registry = CountryRegistry(std::vector<std::string>(codes.begin(), codes.end()));
    if (!codes.empty()) {
        panel.first_year = min_year;
        panel.last_year = max_year;
    }
    return panel;
}

void save_panel(const PanelData& panel, const PanelPaths& paths) {
    auto open = [](const std::filesystem::path& path) {
        std::ofstream out(path);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        return out;
    };

    {
        auto out = open(paths.wealth);
        out << "country,year,wealth\n";
        for (const auto& [key, value] : panel.wealth) {
            out << key.first << ',' << key.second << ',' << format_double(value) << '\n';
        }
    }
    {
        auto out = open(paths.trade);
        out << "reporter,partner,year,flow\n";
        for (const auto& [key, value] : panel.trade) {
            out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
                << format_double(value) << '\n';
        }
    }
    {
        auto out = open(paths.milex);
        out << "country,year,expenditure\n";
        for (const auto& [key, value] : panel.milex) {
            out << key.first << ',' << key.second << ',' << format_double(value) << '\n';
        }
    }
    {
        auto out = open(paths.conflicts);
        out << "aggressor,target,year,expenditure\n";
        for (const auto& [key, value] : panel.conflicts) {
            out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
                << format_double(value) << '\n';
        }
    }
}

PanelSubset drop_missing_wealth(const PanelData& panel, int year) {
    std::set<std::string> kept;
    std::vector<std::string> warnings;
    for (const auto& code : panel.registry.codes()) {
        if (panel.wealth_at(code, year)) {
            kept.insert(code);
        } else {
            warnings.push_back(code + " has no wealth in " + std::to_string(year) +
                               "; dropped from the registry");
        }
    }
    if (warnings.empty()) {
        return {panel, {}};
    }
    return {panel.restricted_to(kept), std::move(warnings)};
}

SizeVector sizes_at(const PanelData& panel, int year) {
    const int n = panel.registry.size();
    SizeVector sizes(n);
    for (int i = 0; i < n; ++i) {
        const auto value = panel.wealth_at(panel.registry.code(i), year);
        if (!value) {
            throw std::runtime_error("no wealth for " + panel.registry.code(i) + " in " +
                                     std::to_string(year));
        }
        sizes[i] = *value;
    }
    return sizes;
}

TacticBuild build_tactics(const PanelData& panel, int year, const SizeVector& sizes,
                          ZeroSizePolicy policy) {
    const int n = panel.registry.size();
    if (sizes.size() != n) {
        throw std::invalid_argument("sizes length does not match the registry");
    }
    TacticBuild out;
    out.matrix.constructive = Eigen::MatrixXd::Zero(n, n);
    out.matrix.destructive = Eigen::MatrixXd::Zero(n, n);
    out.matrix.retained = Eigen::VectorXd::Zero(n);

    for (int j = 0; j < n; ++j) {
        const std::string& code = panel.registry.code(j);
        Eigen::VectorXd exports = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd attacks = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            exports[i] = panel.trade_effective(code, panel.registry.code(i), year);
            attacks[i] = panel.conflict_between(code, panel.registry.code(i), year);
        }
        const double outgoing = exports.sum() + attacks.sum();

        if (sizes[j] <= 0.0) {
            if (outgoing > 0.0) {
                if (policy == ZeroSizePolicy::Error) {
                    throw std::runtime_error(code + " originates flows in " +
                                             std::to_string(year) +
                                             " but has zero or missing size");
                }
                out.warnings.push_back(std::to_string(year) + ": " + code +
                                       " has zero size; outgoing flows dropped, column retained");
            }
            out.matrix.retained[j] = 1.0;
            continue;
        }

        Eigen::VectorXd tplus = exports / sizes[j];
        Eigen::VectorXd tminus = attacks / sizes[j];

        // milex is the upper bound on destructive allocation, when known
        if (const auto bound = panel.milex_at(code, year)) {
            const double cap = *bound / sizes[j];
            const double destructive_sum = tminus.sum();
            if (destructive_sum > cap) {
                tminus *= cap / destructive_sum;
                out.warnings.push_back(std::to_string(year) + ": " + code +
                                       " destructive allocation " + format_double(destructive_sum) +
                                       " capped at milex bound " + format_double(cap));
            }
        }

        const double total = tplus.sum() + tminus.sum();
        if (total > 1.0) {
            tplus /= total;
            tminus /= total;
            out.matrix.retained[j] = 0.0;
            out.warnings.push_back(std::to_string(year) + ": " + code + " allocates " +
                                   format_double(total) +
                                   " of its stock; column rescaled to 1 (nothing retained)");
        } else {
            out.matrix.retained[j] = 1.0 - total;
        }
        out.matrix.constructive.col(j) = tplus;
        out.matrix.destructive.col(j) = tminus;
    }
    return out;
}

Eigen::VectorXd civil_war_diagonal(const PanelData& panel, int year, const SizeVector& sizes,
                                   ZeroSizePolicy policy) {
    const int n = panel.registry.size();
    if (sizes.size() != n) {
        throw std::invalid_argument("sizes length does not match the registry");
    }
    Eigen::VectorXd fractions = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const std::string& code = panel.registry.code(j);
        const double x = panel.conflict_between(code, code, year);
        if (x <= 0.0) continue;
        if (sizes[j] <= 0.0) {
            if (policy == ZeroSizePolicy::Error) {
                throw std::runtime_error(code + " originates flows in " + std::to_string(year) +
                                         " but has zero or missing size");
            }
            continue;
        }
        fractions[j] = x / sizes[j];
    }
    return fractions;
}

}  // namespace powerflow

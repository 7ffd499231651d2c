#include "powerflow/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace powerflow {

double peacetime_growth(const std::map<int, double>& wealth_by_year,
                        const std::set<int>& war_years) {
    double log_sum = 0.0;
    int pairs = 0;
    for (const auto& [year, value] : wealth_by_year) {
        auto next = wealth_by_year.find(year + 1);
        if (next == wealth_by_year.end()) continue;
        if (war_years.count(year) || war_years.count(year + 1)) continue;
        if (value <= 0.0 || next->second <= 0.0) continue;
        log_sum += std::log(next->second / value);
        ++pairs;
    }
    if (pairs == 0) {
        throw std::runtime_error("insufficient peacetime observations");
    }
    return std::exp(log_sum / pairs);
}

std::vector<Episode> episodes_from_conflicts(const PanelData& panel) {
    std::map<std::string, std::set<int>> by_country;
    for (const auto& [key, value] : panel.conflicts) {
        (void)value;
        if (std::get<0>(key) == std::get<1>(key)) {
            by_country[std::get<0>(key)].insert(std::get<2>(key));
        }
    }
    std::vector<Episode> episodes;
    episodes.reserve(by_country.size());
    for (auto& [country, years] : by_country) {
        episodes.push_back({country, std::move(years)});
    }
    return episodes;
}

MuEstimate estimate_mu(const PanelData& panel, const std::vector<Episode>& episodes) {
    if (episodes.empty()) {
        throw std::runtime_error("no episodes");
    }
    MuEstimate estimate;
    for (const auto& episode : episodes) {
        if (episode.war_years.empty()) continue;
        const auto series = panel.wealth_series(episode.country);
        const double rate = peacetime_growth(series, episode.war_years);

        const int first_war = *episode.war_years.begin();
        int base_year = std::numeric_limits<int>::min();
        for (const auto& [year, value] : series) {
            (void)value;
            if (year < first_war) base_year = std::max(base_year, year);
        }
        if (base_year == std::numeric_limits<int>::min()) {
            throw std::runtime_error(episode.country + ": no pre-war wealth observation");
        }
        const double base = series.at(base_year);

        for (int year : episode.war_years) {
            auto actual = series.find(year);
            if (actual == series.end()) continue;  // no data for that war year
            const double expected = base * std::pow(rate, year - base_year);
            if (!(expected > 0.0)) {
                throw std::runtime_error(episode.country + " " + std::to_string(year) +
                                         ": expected wealth is non-positive");
            }
            const auto x = panel.milex_at(episode.country, year);
            if (!x) {
                throw std::runtime_error(episode.country + " " + std::to_string(year) +
                                         ": war year without military expenditure");
            }
            if (!(*x > 0.0)) {
                throw std::runtime_error(episode.country + " " + std::to_string(year) +
                                         ": war-year military expenditure is zero");
            }
            const double loss = expected - actual->second;
            estimate.records.push_back(
                {episode.country, year, expected, actual->second, loss, *x, (loss - *x) / *x});
        }
    }
    if (estimate.records.empty()) {
        throw std::runtime_error("no usable war-year records");
    }

    estimate.count = static_cast<int>(estimate.records.size());
    double sum = 0.0;
    std::vector<double> mus;
    mus.reserve(estimate.records.size());
    for (const auto& r : estimate.records) {
        sum += r.mu;
        mus.push_back(r.mu);
    }
    estimate.raw_mean = sum / estimate.count;

    // nearest-rank 90th percentile; records strictly above it are dropped
    std::sort(mus.begin(), mus.end());
    const auto rank = static_cast<size_t>(std::ceil(0.9 * static_cast<double>(mus.size())));
    const double threshold = mus[rank - 1];
    double trimmed_sum = 0.0;
    int kept = 0;
    for (double mu : mus) {
        if (mu <= threshold) {
            trimmed_sum += mu;
            ++kept;
        }
    }
    estimate.trimmed_mean = trimmed_sum / kept;
    estimate.trimmed_count = kept;
    return estimate;
}

GrowthFit fit_growth_regression(const PanelData& panel) {
    GrowthFit fit;

    std::set<CountryYearKey> war;
    for (const auto& [key, value] : panel.conflicts) {
        (void)value;
        war.insert({std::get<0>(key), std::get<2>(key)});
        war.insert({std::get<1>(key), std::get<2>(key)});
    }

    for (const auto& code : panel.registry.codes()) {
        const auto series = panel.wealth_series(code);
        for (const auto& [year, value] : series) {
            auto next = series.find(year + 1);
            if (next == series.end()) continue;
            if (war.count({code, year}) || war.count({code, year + 1})) continue;
            if (value <= 0.0) continue;
            fit.observations.push_back(
                {code, year, next->second / value, panel.trade_volume(code, year) / value});
        }
    }

    const auto n = fit.observations.size();
    if (n < 2) {
        throw std::runtime_error("growth regression needs at least 2 observations, got " +
                                 std::to_string(n));
    }
    double mean_tp = 0.0;
    double mean_g = 0.0;
    for (const auto& obs : fit.observations) {
        mean_tp += obs.trade_percentage;
        mean_g += obs.growth;
    }
    mean_tp /= static_cast<double>(n);
    mean_g /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& obs : fit.observations) {
        const double dx = obs.trade_percentage - mean_tp;
        sxx += dx * dx;
        sxy += dx * (obs.growth - mean_g);
    }
    if (!(sxx > 0.0)) {
        throw std::runtime_error("degenerate design: trade percentage has no variation");
    }
    fit.slope = sxy / sxx;
    fit.intercept = mean_g - fit.slope * mean_tp;
    fit.n = static_cast<int>(n);
    for (const auto& obs : fit.observations) {
        const double residual = obs.growth - fit.intercept - fit.slope * obs.trade_percentage;
        fit.rss += residual * residual;
    }
    return fit;
}

BetaFit fit_beta(const PanelData& panel, double lambda, double mu, const BetaGrid& grid) {
    if (!(grid.lo > 1.0)) {
        throw std::invalid_argument("beta grid must start above 1");
    }
    if (!(grid.step > 0.0) || grid.hi < grid.lo) {
        throw std::invalid_argument("empty beta grid");
    }

    BetaFit fit;
    fit.grid = grid;

    // Everything except beta is fixed per year pair, so the one step
    //   Ramp(beta * (T+ s) + [-mu T- s + lambda T0 s - (1+mu) cw s])
    // is precomputed into a constructive term and a fixed term.
    struct YearTerms {
        Eigen::VectorXd constructive;
        Eigen::VectorXd fixed;
        Eigen::VectorXd target;
    };
    std::vector<YearTerms> terms;

    for (int year = panel.first_year; year < panel.last_year; ++year) {
        std::set<std::string> covered;
        for (const auto& code : panel.registry.codes()) {
            if (panel.wealth_at(code, year) && panel.wealth_at(code, year + 1)) {
                covered.insert(code);
            }
        }
        if (covered.empty()) continue;
        const bool partial = static_cast<int>(covered.size()) != panel.registry.size();
        PanelData restricted;
        if (partial) {
            fit.warnings.push_back(
                std::to_string(year) + ": " +
                std::to_string(panel.registry.size() - static_cast<int>(covered.size())) +
                " countries without wealth at both ends excluded");
            restricted = panel.restricted_to(covered);
        }
        const PanelData& p = partial ? restricted : panel;

        const SizeVector sizes = sizes_at(p, year);
        const TacticBuild build = build_tactics(p, year, sizes, ZeroSizePolicy::Error);
        const Eigen::VectorXd cw = civil_war_diagonal(p, year, sizes, ZeroSizePolicy::Error);

        YearTerms yt;
        yt.constructive = build.matrix.constructive * sizes;
        yt.fixed = -mu * (build.matrix.destructive * sizes) +
                   lambda * build.matrix.retained.cwiseProduct(sizes) -
                   (1.0 + mu) * cw.cwiseProduct(sizes);
        yt.target = sizes_at(p, year + 1);
        terms.push_back(std::move(yt));
    }
    if (terms.empty()) {
        throw std::runtime_error("panel has no consecutive years with wealth data");
    }

    const int candidates =
        static_cast<int>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
    fit.curve.reserve(static_cast<size_t>(candidates));
    double best_objective = std::numeric_limits<double>::infinity();
    double best_beta = grid.lo;
    for (int k = 0; k < candidates; ++k) {
        const double beta = grid.lo + k * grid.step;
        double total = 0.0;
        for (const auto& yt : terms) {
            total += ((beta * yt.constructive + yt.fixed).cwiseMax(0.0) - yt.target).norm();
        }
        const double objective = total / static_cast<double>(terms.size());
        fit.curve.emplace_back(beta, objective);
        if (objective < best_objective) {
            best_objective = objective;
            best_beta = beta;
        }
    }
    fit.best_beta = best_beta;
    fit.objective = best_objective;
    return fit;
}

}  // namespace powerflow

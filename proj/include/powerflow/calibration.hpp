#pragma once

#include "powerflow/panel.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace powerflow {

/// Annualized wealth growth multiplier over consecutive non-war year
/// pairs (geometric mean of the year-over-year ratios). Throws when no
/// usable pair exists.
double peacetime_growth(const std::map<int, double>& wealth_by_year,
                        const std::set<int>& war_years);

/// One country's internal-conflict window used for mu estimation.
struct Episode {
    std::string country;
    std::set<int> war_years;
};

/// Episodes read off the panel itself: one per country with
/// aggressor == target conflict rows, war years taken from those rows.
std::vector<Episode> episodes_from_conflicts(const PanelData& panel);

struct MuRecord {
    std::string country;
    int year = 0;
    double expected = 0;  // counterfactual wealth at the peacetime rate
    double actual = 0;
    double loss = 0;  // expected - actual
    double x = 0;     // military expenditure that year
    double mu = 0;    // (loss - x) / x
};

struct MuEstimate {
    std::vector<MuRecord> records;
    double raw_mean = 0;
    double trimmed_mean = 0;  // records above the 90th percentile of mu excluded
    int count = 0;
    int trimmed_count = 0;
};

/// Destruction multiplier from civil wars: the wealth a war year fell
/// short of its peacetime-compounded expectation, less the expenditure
/// itself, per unit of expenditure.
MuEstimate estimate_mu(const PanelData& panel, const std::vector<Episode>& episodes);

struct GrowthObservation {
    std::string country;
    int year = 0;
    double growth = 0;            // wealth(t+1) / wealth(t)
    double trade_percentage = 0;  // trade volume(t) / wealth(t)
};

struct GrowthFit {
    double intercept = 0;  // the lambda estimate
    double slope = 0;
    int n = 0;
    double rss = 0;
    std::vector<GrowthObservation> observations;
};

/// Ordinary least squares of annual growth on trade percentage, pooled
/// over peacetime country-years.
GrowthFit fit_growth_regression(const PanelData& panel);

struct BetaGrid {
    double lo = 1.001;
    double hi = 2.0;
    double step = 0.001;
};

struct BetaFit {
    double best_beta = 0;
    double objective = 0;  // mean Euclidean distance, predicted vs actual
    BetaGrid grid;
    std::vector<std::pair<double, double>> curve;  // (beta, objective) per candidate
    std::vector<std::string> warnings;
};

/// Grid scan for the constructive multiplier: for every candidate and
/// every consecutive year pair, one step of the law of motion from the
/// actual wealth vector, scored by Euclidean distance to the next
/// year's actual wealth. Ties go to the lowest candidate.
BetaFit fit_beta(const PanelData& panel, double lambda, double mu, const BetaGrid& grid = {});

}  // namespace powerflow

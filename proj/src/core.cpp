#include "powerflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace powerflow {

CountryRegistry::CountryRegistry(std::vector<std::string> codes) : codes_(std::move(codes)) {
    std::sort(codes_.begin(), codes_.end());
    codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
    index_.reserve(codes_.size());
    for (int i = 0; i < static_cast<int>(codes_.size()); ++i) {
        index_.emplace(codes_[static_cast<size_t>(i)], i);
    }
}

int CountryRegistry::index_of(const std::string& code) const {
    auto it = index_.find(code);
    if (it == index_.end()) {
        throw std::out_of_range("unknown country code: " + code);
    }
    return it->second;
}

std::optional<int> CountryRegistry::find(const std::string& code) const {
    auto it = index_.find(code);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

TacticMatrix TacticMatrix::pure_retention(int n) {
    TacticMatrix t;
    t.constructive = Eigen::MatrixXd::Zero(n, n);
    t.destructive = Eigen::MatrixXd::Zero(n, n);
    t.retained = Eigen::VectorXd::Ones(n);
    return t;
}

Eigen::MatrixXd TacticMatrix::combined(double beta, double mu, double lambda) const {
    Eigen::MatrixXd m = beta * constructive - mu * destructive;
    m.diagonal() += lambda * retained;
    return m;
}

void Parameters::require_model_ranges() const {
    if (!(beta > 1.0)) {
        throw std::invalid_argument("parameter beta must exceed 1");
    }
    if (!(mu > beta)) {
        throw std::invalid_argument("parameter mu must exceed beta");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("parameter lambda must be positive");
    }
    if (beta_by_country && (beta_by_country->array() <= 1.0).any()) {
        throw std::invalid_argument("per-country beta entries must exceed 1");
    }
    if (lambda_by_country && (lambda_by_country->array() <= 0.0).any()) {
        throw std::invalid_argument("per-country lambda entries must be positive");
    }
}

namespace {

std::string number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void check_entry(ValidationReport& report, const std::string& which, const Eigen::MatrixXd& m,
                 int i, int j, const CountryRegistry& registry) {
    const double v = m(i, j);
    if (v < 0.0 || v > 1.0) {
        report.push_back({"entry-range", i, j, v,
                          which + "[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                              number(v) + " is outside [0, 1]"});
    }
    if (i == j && v != 0.0) {
        report.push_back({"diagonal", i, j, v,
                          "nonzero diagonal in " + which + " at " + registry.code(j) + " (" +
                              number(v) + ")"});
    }
}

}  // namespace

ValidationReport validate(const PowerStructure& ps, double column_tolerance) {
    ValidationReport report;
    const int n = ps.registry.size();
    const TacticMatrix& t = ps.tactics;

    const bool dims_ok = ps.sizes.size() == n && t.constructive.rows() == n &&
                         t.constructive.cols() == n && t.destructive.rows() == n &&
                         t.destructive.cols() == n && t.retained.size() == n;
    if (!dims_ok) {
        report.push_back({"dimensions", -1, -1, 0.0,
                          "sizes/tactics dimensions do not match the registry (" +
                              std::to_string(n) + " countries)"});
        return report;
    }

    for (int i = 0; i < n; ++i) {
        if (ps.sizes[i] < 0.0) {
            report.push_back({"negative-size", i, -1, ps.sizes[i],
                              "size of " + ps.registry.code(i) + " is negative (" +
                                  number(ps.sizes[i]) + ")"});
        }
    }

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            check_entry(report, "T+", t.constructive, i, j, ps.registry);
            check_entry(report, "T-", t.destructive, i, j, ps.registry);
        }
        if (t.retained[j] < 0.0 || t.retained[j] > 1.0) {
            report.push_back({"entry-range", j, j, t.retained[j],
                              "T0[" + std::to_string(j) + "][" + std::to_string(j) + "] = " +
                                  number(t.retained[j]) + " is outside [0, 1]"});
        }
        const double column_sum =
            t.constructive.col(j).sum() + t.destructive.col(j).sum() + t.retained[j];
        const double excess = column_sum - 1.0;
        if (std::abs(excess) > column_tolerance) {
            report.push_back({"column-sum", -1, j, excess,
                              "column " + std::to_string(j) + " (" + ps.registry.code(j) +
                                  ") sums to " + number(column_sum) + " (excess " +
                                  number(excess) + ")"});
        }
    }
    return report;
}

SizeVector step(const PowerStructure& ps, const Parameters& params,
                const std::optional<Eigen::VectorXd>& self_destruction) {
    const int n = ps.registry.size();
    if (ps.sizes.size() != n || ps.tactics.size() != n || ps.tactics.constructive.cols() != n ||
        ps.tactics.destructive.cols() != n) {
        throw std::invalid_argument("power structure dimensions do not match the registry");
    }
    if (params.beta_by_country && params.beta_by_country->size() != n) {
        throw std::invalid_argument("beta vector length does not match the registry");
    }
    if (params.lambda_by_country && params.lambda_by_country->size() != n) {
        throw std::invalid_argument("lambda vector length does not match the registry");
    }
    if (self_destruction && self_destruction->size() != n) {
        throw std::invalid_argument("self-destruction vector length does not match the registry");
    }

    Eigen::VectorXd gained = ps.tactics.constructive * ps.sizes;
    if (params.beta_by_country) {
        gained = params.beta_by_country->cwiseProduct(gained);
    } else {
        gained *= params.beta;
    }

    Eigen::VectorXd next = std::move(gained);
    next.noalias() -= params.mu * (ps.tactics.destructive * ps.sizes);

    Eigen::VectorXd kept = ps.tactics.retained.cwiseProduct(ps.sizes);
    if (params.lambda_by_country) {
        next += params.lambda_by_country->cwiseProduct(kept);
    } else {
        next += params.lambda * kept;
    }

    if (self_destruction) {
        next -= (1.0 + params.mu) * self_destruction->cwiseProduct(ps.sizes);
    }
    return next.cwiseMax(0.0);
}

std::pair<double, double> constructive_delta(double x, double beta) {
    return {-x, beta * x};
}

std::pair<double, double> destructive_delta(double x, double mu) {
    return {-x, -mu * x};
}

}  // namespace powerflow

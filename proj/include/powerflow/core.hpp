#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace powerflow {

using SizeVector = Eigen::VectorXd;

/// Fixed, lexicographically sorted set of ISO-3166 alpha-3 codes.
/// Every vector and matrix in the model is indexed by this registry;
/// states never enter or exit during a run.
class CountryRegistry {
public:
    CountryRegistry() = default;
    explicit CountryRegistry(std::vector<std::string> codes);

    int size() const { return static_cast<int>(codes_.size()); }
    bool empty() const { return codes_.empty(); }
    const std::vector<std::string>& codes() const { return codes_; }
    const std::string& code(int index) const { return codes_.at(static_cast<size_t>(index)); }

    /// Position of a code; throws std::out_of_range for unknown codes.
    int index_of(const std::string& code) const;
    std::optional<int> find(const std::string& code) const;
    bool contains(const std::string& code) const { return find(code).has_value(); }

    bool operator==(const CountryRegistry& other) const { return codes_ == other.codes_; }

private:
    std::vector<std::string> codes_;
    std::unordered_map<std::string, int> index_;
};

/// Column-stochastic allocation decomposition. Column j is state j's
/// foreign policy: constructive(i, j) and destructive(i, j) are the
/// fractions of j's stock directed at i, retained(j) the fraction kept
/// at home. Each column sums to one.
struct TacticMatrix {
    Eigen::MatrixXd constructive;  // zero diagonal
    Eigen::MatrixXd destructive;   // zero diagonal
    Eigen::VectorXd retained;      // diagonal of the self-allocation matrix

    static TacticMatrix pure_retention(int n);

    int size() const { return static_cast<int>(retained.size()); }

    /// beta*T+ - mu*T- + lambda*T0 as one signed dense matrix.
    Eigen::MatrixXd combined(double beta, double mu, double lambda) const;
};

/// Law-of-motion multipliers. beta and lambda may also be supplied per
/// country; the scalar is broadcast when the vector is absent.
struct Parameters {
    double beta = 1.392;
    double mu = 30.0;
    double lambda = 1.025;
    std::optional<Eigen::VectorXd> beta_by_country;
    std::optional<Eigen::VectorXd> lambda_by_country;

    /// Enforces the modelling ranges (beta > 1, mu > beta, lambda > 0).
    /// step() itself only needs finite values, so degenerate settings
    /// (e.g. beta = 1 for conservation checks) stay expressible.
    void require_model_ranges() const;
};

/// The model state {s, T}.
struct PowerStructure {
    CountryRegistry registry;
    SizeVector sizes;
    TacticMatrix tactics;
};

struct Violation {
    std::string rule;  // "dimensions", "negative-size", "entry-range", "diagonal", "column-sum"
    int row = -1;      // -1 when not applicable
    int column = -1;
    double magnitude = 0.0;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Checks every structural invariant of a power structure. Violations
/// are data, not errors; an empty report means valid.
ValidationReport validate(const PowerStructure& ps, double column_tolerance = 1e-9);

/// One application of the law of motion,
///
///   s(t+1) = Ramp((beta T+ - mu T- + lambda T0) . s(t))
///
/// where Ramp clamps at zero so no state ends up with negative size.
/// `self_destruction` holds each state's internal-conflict expenditure
/// as a fraction of its size; (1 + mu) * fraction * size is subtracted
/// from that state after the matrix product, before ramping. Internal
/// conflict is kept off the matrix because its diagonal is reserved for
/// retention.
SizeVector step(const PowerStructure& ps, const Parameters& params,
                const std::optional<Eigen::VectorXd>& self_destruction = std::nullopt);

/// Size changes (sender, receiver) for a constructive transfer of x.
std::pair<double, double> constructive_delta(double x, double beta);

/// Size changes (sender, receiver) for a destructive expenditure of x.
std::pair<double, double> destructive_delta(double x, double mu);

}  // namespace powerflow

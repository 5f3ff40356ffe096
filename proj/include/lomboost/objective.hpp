#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lomboost {

/// Tolerance used when validating that probabilities sum to one and that a
/// split's marginal agrees with its class conditionals.
inline constexpr double kProbabilityTolerance = 1e-9;

/// Probability vector over k classes at a node. Entries are in [0, 1] and sum
/// to one within kProbabilityTolerance. Zero-mass classes are allowed.
class ClassDistribution {
public:
    explicit ClassDistribution(std::vector<double> probs);

    /// Normalizes non-negative counts. Throws if every count is zero.
    static ClassDistribution from_counts(std::span<const double> counts);
    static ClassDistribution from_counts(std::span<const std::uint64_t> counts);
    static ClassDistribution uniform(std::size_t k);
    static ClassDistribution point_mass(std::size_t k, std::size_t index);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }

private:
    std::vector<double> probs_;
};

/// Marginal routing probability beta = P(h(x) > 0) together with the
/// per-class conditionals P_i = P(h(x) > 0 | i).
class SplitStatistics {
public:
    /// Raw construction; entries are range-checked but not tied to any
    /// distribution.
    SplitStatistics(double marginal, std::vector<double> conditionals);

    /// Builds statistics whose marginal is dot(dist, conditionals).
    static SplitStatistics from_conditionals(const ClassDistribution& dist,
                                             std::vector<double> conditionals);

    double marginal() const noexcept { return marginal_; }
    std::span<const double> conditionals() const noexcept { return conditionals_; }
    std::size_t size() const noexcept { return conditionals_.size(); }

private:
    double marginal_;
    std::vector<double> conditionals_;
};

/// Split objective J = 2 * sum_i pi_i * |beta - P_i|, in [0, 1].
/// Throws std::invalid_argument on dimension mismatch, k < 2, or when the
/// marginal disagrees with dot(pi, P) beyond kProbabilityTolerance.
double objective_value(const ClassDistribution& dist, const SplitStatistics& stats);

/// Purity factor sum_i pi_i * min(P_i, 1 - P_i), in [0, 0.5].
double purity_factor(const ClassDistribution& dist, const SplitStatistics& stats);

/// Balancing factor: the marginal beta.
double balancing_factor(const SplitStatistics& stats) noexcept;

struct Interval {
    double lo;
    double hi;

    bool contains(double x, double slack = 0.0) const noexcept {
        return x >= lo - slack && x <= hi + slack;
    }
};

/// Range guaranteed to contain beta for a hypothesis with objective j:
/// [0.5(1 - sqrt(1 - j)), 0.5(1 + sqrt(1 - j))].
Interval balance_interval(double j);

/// Upper bound on the purity factor of a split with objective j and balance
/// beta: min((2 - j) / (4 b) - b, 0.5) with b = min(beta, 1 - beta). The
/// expression only bounds alpha when evaluated on the lighter side; for
/// beta > 0.5 the raw form goes negative (pi = (0.5, 0.5), P = (0.9, 0.9)
/// has alpha = 0.1 but (2 - 0) / 3.6 - 0.9 < 0). beta must lie in (0, 1).
double purity_upper_bound(double j, double beta);

}  // namespace lomboost

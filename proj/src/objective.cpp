#include "lomboost/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lomboost {

namespace {

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                    std::to_string(x));
    }
}

void check_pair(const ClassDistribution& dist, const SplitStatistics& stats) {
    if (dist.size() != stats.size()) {
        throw std::invalid_argument("class distribution has " + std::to_string(dist.size()) +
                                    " entries but split statistics have " +
                                    std::to_string(stats.size()));
    }
    if (dist.size() < 2) {
        throw std::invalid_argument("at least two classes are required");
    }
    const auto p = stats.conditionals();
    double dot = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) dot += dist[i] * p[i];
    if (std::abs(dot - stats.marginal()) > kProbabilityTolerance) {
        throw std::invalid_argument("inconsistent split statistics: marginal " +
                                    std::to_string(stats.marginal()) + " but dot(pi, P) = " +
                                    std::to_string(dot));
    }
}

}  // namespace

ClassDistribution::ClassDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("class distribution is empty");
    double sum = 0.0;
    for (double p : probs_) {
        check_unit(p, "class probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        throw std::invalid_argument("class probabilities sum to " + std::to_string(sum));
    }
}

ClassDistribution ClassDistribution::from_counts(std::span<const double> counts) {
    double total = 0.0;
    for (double c : counts) {
        if (!(c >= 0.0)) throw std::invalid_argument("negative class count");
        total += c;
    }
    if (total <= 0.0) throw std::invalid_argument("class counts are all zero");
    std::vector<double> probs(counts.size());
    std::transform(counts.begin(), counts.end(), probs.begin(),
                   [total](double c) { return c / total; });
    return ClassDistribution(std::move(probs));
}

ClassDistribution ClassDistribution::from_counts(std::span<const std::uint64_t> counts) {
    std::vector<double> as_double(counts.begin(), counts.end());
    return from_counts(std::span<const double>(as_double));
}

ClassDistribution ClassDistribution::uniform(std::size_t k) {
    if (k == 0) throw std::invalid_argument("class distribution is empty");
    return ClassDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

ClassDistribution ClassDistribution::point_mass(std::size_t k, std::size_t index) {
    if (index >= k) throw std::invalid_argument("point mass index out of range");
    std::vector<double> probs(k, 0.0);
    probs[index] = 1.0;
    return ClassDistribution(std::move(probs));
}

SplitStatistics::SplitStatistics(double marginal, std::vector<double> conditionals)
    : marginal_(marginal), conditionals_(std::move(conditionals)) {
    check_unit(marginal_, "marginal routing probability");
    for (double p : conditionals_) check_unit(p, "conditional routing probability");
}

SplitStatistics SplitStatistics::from_conditionals(const ClassDistribution& dist,
                                                   std::vector<double> conditionals) {
    if (dist.size() != conditionals.size()) {
        throw std::invalid_argument("conditionals do not match the class count");
    }
    double beta = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) beta += dist[i] * conditionals[i];
    return SplitStatistics(std::clamp(beta, 0.0, 1.0), std::move(conditionals));
}

double objective_value(const ClassDistribution& dist, const SplitStatistics& stats) {
    check_pair(dist, stats);
    const double beta = stats.marginal();
    const auto p = stats.conditionals();
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) sum += dist[i] * std::abs(beta - p[i]);
    return 2.0 * sum;
}

double purity_factor(const ClassDistribution& dist, const SplitStatistics& stats) {
    check_pair(dist, stats);
    const auto p = stats.conditionals();
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) sum += dist[i] * std::min(p[i], 1.0 - p[i]);
    return sum;
}

double balancing_factor(const SplitStatistics& stats) noexcept { return stats.marginal(); }

Interval balance_interval(double j) {
    check_unit(j, "objective value");
    const double r = std::sqrt(std::clamp(1.0 - j, 0.0, 1.0));
    return {0.5 * (1.0 - r), 0.5 * (1.0 + r)};
}

double purity_upper_bound(double j, double beta) {
    check_unit(j, "objective value");
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("purity bound needs beta in (0, 1), got " +
                                    std::to_string(beta));
    }
    // Swapping the two sides keeps J and alpha, so the bound is stated for
    // the lighter side.
    const double side = std::min(beta, 1.0 - beta);
    return std::min((2.0 - j) / (4.0 * side) - side, 0.5);
}

}  // namespace lomboost

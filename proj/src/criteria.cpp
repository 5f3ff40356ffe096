#include "lomboost/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lomboost {

namespace {

double shannon(std::span<const double> p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log(x);
    }
    return h;
}

double gini(std::span<const double> p) {
    double g = 0.0;
    for (double x : p) g += x * (1.0 - x);
    return g;
}

double modified_gini(std::span<const double> p, double c) {
    double g = 0.0;
    for (double x : p) g += std::sqrt(x * (c - x));
    return g;
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw std::invalid_argument("gamma must lie in (0, 0.5], got " + std::to_string(gamma));
    }
}

}  // namespace

CriterionKind CriterionKind::modified_gini(double c) {
    if (!(c > 2.0) || !std::isfinite(c)) {
        throw std::invalid_argument("modified gini needs C > 2, got " + std::to_string(c));
    }
    return CriterionKind(Tag::ModifiedGini, c);
}

std::string CriterionKind::name() const {
    switch (tag_) {
    case Tag::ShannonEntropy: return "entropy";
    case Tag::Gini: return "gini";
    case Tag::ModifiedGini: return "mgini";
    }
    return "unknown";
}

CriterionKind parse_criterion(const std::string& name, double c) {
    if (name == "entropy") return CriterionKind::shannon();
    if (name == "gini") return CriterionKind::gini();
    if (name == "mgini") return CriterionKind::modified_gini(c);
    throw std::invalid_argument("unknown criterion '" + name + "' (expected entropy|gini|mgini)");
}

SplitDecomposition::SplitDecomposition(ClassDistribution parent, double beta,
                                       ClassDistribution left, ClassDistribution right)
    : parent_(std::move(parent)), beta_(beta), left_(std::move(left)), right_(std::move(right)) {
    if (!(beta_ >= 0.0 && beta_ <= 1.0)) {
        throw std::invalid_argument("split beta must lie in [0, 1]");
    }
    if (left_.size() != parent_.size() || right_.size() != parent_.size()) {
        throw std::invalid_argument("split children do not match the parent's class count");
    }
    for (std::size_t i = 0; i < parent_.size(); ++i) {
        const double mix = (1.0 - beta_) * left_[i] + beta_ * right_[i];
        if (std::abs(mix - parent_[i]) > kProbabilityTolerance) {
            throw std::invalid_argument("mixture identity violated at class " + std::to_string(i));
        }
    }
}

SplitDecomposition SplitDecomposition::from_split(const ClassDistribution& parent,
                                                  const SplitStatistics& stats) {
    if (stats.size() != parent.size()) {
        throw std::invalid_argument("split statistics do not match the class count");
    }
    const auto p = stats.conditionals();
    const std::size_t k = parent.size();
    std::vector<double> left_mass(k), right_mass(k);
    for (std::size_t i = 0; i < k; ++i) {
        left_mass[i] = parent[i] * (1.0 - p[i]);
        right_mass[i] = parent[i] * p[i];
    }
    auto left = ClassDistribution::from_counts(std::span<const double>(left_mass));
    auto right = ClassDistribution::from_counts(std::span<const double>(right_mass));
    double beta = 0.0;
    for (double m : right_mass) beta += m;
    if (std::abs(beta - stats.marginal()) > kProbabilityTolerance) {
        throw std::invalid_argument("inconsistent split statistics");
    }
    return SplitDecomposition(parent, beta, std::move(left), std::move(right));
}

double leaf_criterion(const ClassDistribution& dist, const CriterionKind& kind) {
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return shannon(dist.probs());
    case CriterionKind::Tag::Gini: return gini(dist.probs());
    case CriterionKind::Tag::ModifiedGini: return modified_gini(dist.probs(), kind.c());
    }
    return 0.0;
}

double tree_criterion(std::span<const WeightedLeaf> leaves, const CriterionKind& kind) {
    if (leaves.empty()) throw std::invalid_argument("tree has no leaves");
    double total_weight = 0.0;
    double value = 0.0;
    for (const auto& leaf : leaves) {
        if (!(leaf.weight >= 0.0)) throw std::invalid_argument("negative leaf weight");
        total_weight += leaf.weight;
        value += leaf.weight * leaf_criterion(leaf.dist, kind);
    }
    if (std::abs(total_weight - 1.0) > kProbabilityTolerance) {
        throw std::invalid_argument("leaf weights sum to " + std::to_string(total_weight));
    }
    return value;
}

Interval criterion_bounds(long t, long k, double w, const CriterionKind& kind) {
    if (t < 0) throw std::invalid_argument("number of internal nodes must be non-negative");
    if (k < 2) throw std::invalid_argument("at least two classes are required");
    if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("leaf weight must lie in (0, 1]");
    const double leaves = static_cast<double>(t + 1);
    const double kd = static_cast<double>(k);
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return {0.0, leaves * w * std::log(kd)};
    case CriterionKind::Tag::Gini: return {0.0, leaves * w * (1.0 - 1.0 / kd)};
    case CriterionKind::Tag::ModifiedGini:
        return {std::sqrt(kind.c() - 1.0), leaves * w * std::sqrt(kd * kind.c() - 1.0)};
    }
    return {0.0, 0.0};
}

double split_delta(const SplitDecomposition& split, const CriterionKind& kind) {
    const double beta = split.beta();
    // Degenerate splits (beta in {0, 1}) have no gap by continuity.
    if (beta == 0.0 || beta == 1.0) return 0.0;
    // Every impurity is a sum of scalar concave terms, so the gap is a sum of
    // per-class gaps that are each non-negative. Summing them clamped keeps
    // cancellation noise from producing a negative total.
    const auto pi = split.parent().probs();
    const auto a = split.left().probs();
    const auto b = split.right().probs();
    double gap = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        double term = 0.0;
        switch (kind.tag()) {
        case CriterionKind::Tag::Gini:
            term = beta * (1.0 - beta) * (a[i] - b[i]) * (a[i] - b[i]);
            break;
        case CriterionKind::Tag::ShannonEntropy: {
            auto h = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
            term = h(pi[i]) - (1.0 - beta) * h(a[i]) - beta * h(b[i]);
            break;
        }
        case CriterionKind::Tag::ModifiedGini: {
            const double c = kind.c();
            auto f = [c](double x) { return std::sqrt(x * (c - x)); };
            term = f(pi[i]) - (1.0 - beta) * f(a[i]) - beta * f(b[i]);
            break;
        }
        }
        gap += std::max(term, 0.0);
    }
    return gap;
}

double strong_concavity_modulus(const CriterionKind& kind) {
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return 1.0;
    case CriterionKind::Tag::Gini: return 2.0;
    case CriterionKind::Tag::ModifiedGini: {
        const double c = kind.c();
        return 2.0 * (c - 2.0) * (c - 2.0) / (c * c * c);
    }
    }
    return 0.0;
}

double strong_concavity_lower_bound(const SplitDecomposition& split, const CriterionKind& kind) {
    const auto a = split.left().probs();
    const auto b = split.right().probs();
    double sq_norm = 0.0;
    if (kind.tag() == CriterionKind::Tag::ShannonEntropy) {
        double l1 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
        sq_norm = l1 * l1;
    } else {
        for (std::size_t i = 0; i < a.size(); ++i) sq_norm += (a[i] - b[i]) * (a[i] - b[i]);
    }
    const double beta = split.beta();
    return 0.5 * strong_concavity_modulus(kind) * beta * (1.0 - beta) * sq_norm;
}

double objective_to_delta_bound(double j, double gamma, double g_t, long t, long k,
                                const CriterionKind& kind) {
    check_gamma(gamma);
    if (!(j >= 0.0 && j <= 1.0)) throw std::invalid_argument("objective value must lie in [0, 1]");
    if (j < 2.0 * gamma - kProbabilityTolerance) {
        throw std::invalid_argument("objective value is below 2 gamma");
    }
    if (!(g_t >= 0.0)) throw std::invalid_argument("criterion value must be non-negative");
    if (t < 0) throw std::invalid_argument("number of internal nodes must be non-negative");
    if (k < 2) throw std::invalid_argument("at least two classes are required");

    const double kd = static_cast<double>(k);
    const double numerator = gamma * gamma * g_t;
    const double slack = (1.0 - gamma) * (1.0 - gamma) * static_cast<double>(t + 1);
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return numerator / (2.0 * slack * std::log(kd));
    case CriterionKind::Tag::Gini: return numerator / (slack * (kd - 1.0));
    case CriterionKind::Tag::ModifiedGini: {
        const double c = kind.c();
        const double scale = c * c * c / ((c - 2.0) * (c - 2.0));
        return numerator / (scale * slack * kd * std::sqrt(kd * c - 1.0));
    }
    }
    return 0.0;
}

}  // namespace lomboost

#pragma once

#include "lomboost/objective.hpp"

#include <span>
#include <string>

namespace lomboost {

/// Which entropy-style impurity a tree is measured with. The modified Gini
/// impurity sum_i sqrt(pi_i (C - pi_i)) carries its constant C, which must
/// exceed 2.
class CriterionKind {
public:
    enum class Tag { ShannonEntropy, Gini, ModifiedGini };

    static constexpr double kDefaultModifiedGiniC = 4.0;

    static CriterionKind shannon() noexcept { return CriterionKind(Tag::ShannonEntropy, 0.0); }
    static CriterionKind gini() noexcept { return CriterionKind(Tag::Gini, 0.0); }
    /// Throws std::invalid_argument unless c > 2.
    static CriterionKind modified_gini(double c = kDefaultModifiedGiniC);

    Tag tag() const noexcept { return tag_; }
    /// Constant of the modified Gini impurity; 0 for the other kinds.
    double c() const noexcept { return c_; }
    /// "entropy", "gini" or "mgini".
    std::string name() const;

    friend bool operator==(const CriterionKind&, const CriterionKind&) = default;

private:
    CriterionKind(Tag tag, double c) noexcept : tag_(tag), c_(c) {}

    Tag tag_;
    double c_;
};

/// Parses "entropy" | "gini" | "mgini" (the latter with constant c).
CriterionKind parse_criterion(const std::string& name, double c = CriterionKind::kDefaultModifiedGiniC);

/// A node distribution written as a mixture of its two children:
/// parent = (1 - beta) * left + beta * right, entrywise within 1e-9.
class SplitDecomposition {
public:
    SplitDecomposition(ClassDistribution parent, double beta, ClassDistribution left,
                       ClassDistribution right);

    /// Children induced by routing statistics:
    /// left_i = pi_i (1 - P_i) / (1 - beta), right_i = pi_i P_i / beta.
    /// Requires beta strictly inside (0, 1).
    static SplitDecomposition from_split(const ClassDistribution& parent,
                                         const SplitStatistics& stats);

    const ClassDistribution& parent() const noexcept { return parent_; }
    double beta() const noexcept { return beta_; }
    const ClassDistribution& left() const noexcept { return left_; }
    const ClassDistribution& right() const noexcept { return right_; }

private:
    ClassDistribution parent_;
    double beta_;
    ClassDistribution left_;
    ClassDistribution right_;
};

struct WeightedLeaf {
    double weight;
    ClassDistribution dist;
};

/// Impurity of a single node distribution. Shannon uses 0 ln(1/0) = 0.
double leaf_criterion(const ClassDistribution& dist, const CriterionKind& kind);

/// Weighted sum of leaf impurities. Weights must be non-negative and sum to
/// one within 1e-9.
double tree_criterion(std::span<const WeightedLeaf> leaves, const CriterionKind& kind);

/// Range of the tree-level criterion for a tree with t internal nodes, k
/// classes and heaviest-leaf weight w:
///   entropy        [0, (t+1) w ln k]
///   gini           [0, (t+1) w (1 - 1/k)]
///   modified gini  [sqrt(C - 1), (t+1) w sqrt(kC - 1)]
Interval criterion_bounds(long t, long k, double w, const CriterionKind& kind);

/// Node-local Jensen gap G(pi) - (1 - beta) G(pi_0) - beta G(pi_1), summed
/// class by class with each class's (non-negative) share clamped at zero, so
/// the result is never negative. Multiply by the node weight to get the drop
/// of the tree-level criterion.
double split_delta(const SplitDecomposition& split, const CriterionKind& kind);

/// Strong-concavity modulus of the impurity, with respect to the l1 norm for
/// entropy (1) and the l2 norm for gini (2) and modified gini (2(C-2)^2/C^3).
double strong_concavity_modulus(const CriterionKind& kind);

/// (modulus / 2) * beta (1 - beta) * ||pi_0 - pi_1||^2 in the kind's norm;
/// split_delta is never below this.
double strong_concavity_lower_bound(const SplitDecomposition& split, const CriterionKind& kind);

/// Guaranteed per-split decrease of the tree-level criterion g_t at step t
/// when the split attains objective j >= 2 gamma under the weak-learning
/// assumption:
///   entropy        gamma^2 g_t / (2 (1-gamma)^2 (t+1) ln k)
///   gini           gamma^2 g_t / ((1-gamma)^2 (t+1) (k-1))
///   modified gini  gamma^2 g_t / (C^3/(C-2)^2 (1-gamma)^2 (t+1) k sqrt(kC-1))
double objective_to_delta_bound(double j, double gamma, double g_t, long t, long k,
                                const CriterionKind& kind);

}  // namespace lomboost

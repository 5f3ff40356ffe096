#pragma once

#include "lomboost/criteria.hpp"
#include "lomboost/data.hpp"
#include "lomboost/objective.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lomboost {

enum class Direction { Left, Right };

// ---------------------------------------------------------------------------
// Node classifier
// ---------------------------------------------------------------------------

/// Linear router h(x) = sign(w.x + b) trained online to increase the split
/// objective. Alongside the weights it keeps running means of the routing
/// indicator (1 = right) per class and overall; these are the empirical P_i
/// and beta of the node.
class NodeModel {
public:
    NodeModel() = default;
    explicit NodeModel(int num_classes);

    double score(const SparseVector& x) const noexcept;
    /// Right iff score > 0.
    Direction route(const SparseVector& x) const noexcept;

    /// Binary regression target for label y: +1 if m_y >= m, else -1. The
    /// first example at an untouched node gets +1. A label not yet seen at
    /// the node is compared with the prior m_y = 0.5, which sends it to the
    /// current minority side.
    int target(Label y) const;

    /// One online step: picks the target for y, moves the score toward it
    /// with a squared-loss step of size lr, then records the post-update
    /// routing indicator in the running statistics.
    void update(const Example& ex, double lr);

    double bias() const noexcept { return bias_; }
    void set_bias(double b) noexcept { bias_ = b; }
    /// Weight of 1-based feature `index` (0 when never touched).
    double weight(FeatureIndex index) const noexcept;
    void set_weight(FeatureIndex index, double w);
    /// Non-zero weights in increasing index order.
    SparseVector nonzero_weights() const;

    int num_classes() const noexcept { return static_cast<int>(class_stats_.size()); }
    std::uint64_t total_count() const noexcept { return total_count_; }
    double marginal_mean() const noexcept { return marginal_mean_; }
    std::uint64_t class_count(Label y) const;
    double class_mean(Label y) const;

private:
    struct ClassStat {
        std::uint64_t count = 0;
        double mean = 0.0;
    };

    std::vector<double> weights_;  // slot i holds feature i; slot 0 unused
    double bias_ = 0.0;
    std::vector<ClassStat> class_stats_;
    double marginal_mean_ = 0.0;
    std::uint64_t total_count_ = 0;
};

/// Free-function form of NodeModel::update.
NodeModel node_update(NodeModel model, const Example& ex, double lr);
Direction route(const NodeModel& model, const SparseVector& x) noexcept;

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

struct TreeNode {
    NodeId id = kNoNode;
    NodeId parent = kNoNode;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    int depth = 0;
    NodeModel model;
    /// histogram[c] = training examples of label c+1 that reach the node.
    std::vector<std::uint64_t> histogram;
    std::uint64_t count = 0;
    bool splittable = false;

    bool is_leaf() const noexcept { return left == kNoNode; }
};

/// Binary tree of node classifiers stored in an arena. Node ids are arena
/// indices; the root is node 0. Leaf weights are exact training fractions.
class Tree {
public:
    Tree() = default;
    /// Root-only tree over the given class histogram.
    Tree(int num_classes, std::vector<std::uint64_t> root_histogram, bool root_splittable);

    /// Rebuilds a tree from its nodes, checking structure and counts.
    static Tree from_nodes(int num_classes, std::vector<TreeNode> nodes);

    bool empty() const noexcept { return nodes_.empty(); }
    int num_classes() const noexcept { return num_classes_; }
    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_internal() const noexcept { return (nodes_.size() - 1) / 2; }
    NodeId root() const noexcept { return 0; }
    std::uint64_t total_count() const;
    const TreeNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    std::span<const TreeNode> nodes() const noexcept { return nodes_; }

    std::vector<NodeId> leaves() const;
    double weight(NodeId id) const;
    ClassDistribution distribution(NodeId id) const;
    std::vector<WeightedLeaf> weighted_leaves() const;
    /// Tree-level criterion sum_l w_l G(pi_l).
    double criterion(const CriterionKind& kind) const;

    NodeId leaf_for(const SparseVector& x) const;

    /// Turns `leaf` into an internal node with the given router and returns
    /// the (left, right) child ids. Both histograms must be non-empty and sum
    /// to the leaf's histogram.
    std::pair<NodeId, NodeId> split(NodeId leaf, NodeModel model,
                                    std::vector<std::uint64_t> left_histogram, bool left_splittable,
                                    std::vector<std::uint64_t> right_histogram,
                                    bool right_splittable);
    void mark_unsplittable(NodeId leaf);

private:
    TreeNode& mutable_node(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }

    int num_classes_ = 0;
    std::vector<TreeNode> nodes_;
};

/// Heaviest splittable leaf, ties to the smallest id; nullopt when none.
std::optional<NodeId> split_next(const Tree& tree);

/// Majority label of the leaf reached by x (ties to the smallest label).
Label predict(const Tree& tree, const SparseVector& x);

/// Fraction of misclassified examples. Rejects an empty tree or dataset.
double evaluate(const Tree& tree, const Dataset& data);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

inline constexpr std::array<double, 7> kLearningRateGrid{0.25, 0.5, 0.75, 1.0, 2.0, 4.0, 8.0};

struct TrainConfig {
    std::size_t max_splits = 31;
    int epochs_per_split = 20;
    double learning_rate = 0.5;
    std::uint64_t seed = 1;
    double criterion_c = CriterionKind::kDefaultModifiedGiniC;
    std::size_t min_node_examples = 2;

    void validate() const;
};

/// Snapshot of the tree after t splits (t internal nodes). Record t = 0 is
/// the root-only tree and carries no split statistics.
struct TraceRecord {
    long t = 0;
    NodeId node = kNoNode;
    double j_value = 0.0;
    double gamma_hat = 0.0;
    double g_e = 0.0;
    double g_g = 0.0;
    double g_m = 0.0;
    std::optional<double> test_error;
};

struct TrainResult {
    Tree tree;
    std::vector<TraceRecord> trace;
    std::vector<std::string> warnings;
};

/// Grows a tree by repeatedly splitting the heaviest splittable leaf. Each
/// split trains a fresh NodeModel for `epochs_per_split` shuffled passes over
/// the leaf's examples, then partitions them by route. A split that leaves a
/// child empty is rolled back and the leaf marked unsplittable. When `test`
/// is given, every trace record carries its error on it.
TrainResult train(const Dataset& data, const TrainConfig& config);
TrainResult train(const Dataset& data, const TrainConfig& config, const Dataset& test);

/// Divides every series by its first value (an all-zero series when the first
/// value is zero).
std::vector<TraceRecord> normalize_trace(std::span<const TraceRecord> records);

struct LearningRateTrial {
    double learning_rate;
    double valid_error;
};

struct LearningRateSelection {
    double best_learning_rate;
    std::vector<LearningRateTrial> trials;
};

/// Trains once per grid value and keeps the rate with the lowest validation
/// error (earliest on ties).
LearningRateSelection select_learning_rate(const Dataset& train_data, const Dataset& valid_data,
                                           TrainConfig config, std::span<const double> grid);

}  // namespace lomboost

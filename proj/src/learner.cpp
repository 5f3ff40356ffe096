#include "lomboost/learner.hpp"

#include "lomboost/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace lomboost {

namespace {

// Slack for the per-split monotonicity and strong-concavity assertions.
constexpr double kTraceTolerance = 1e-9;

std::size_t label_slot(Label y, std::size_t num_classes) {
    if (y < 1 || static_cast<std::size_t>(y) > num_classes) {
        throw std::invalid_argument("label " + std::to_string(y) + " outside 1.." +
                                    std::to_string(num_classes));
    }
    return static_cast<std::size_t>(y - 1);
}

int distinct(std::span<const std::uint64_t> histogram) {
    return static_cast<int>(std::count_if(histogram.begin(), histogram.end(),
                                          [](std::uint64_t c) { return c > 0; }));
}

std::uint64_t total(std::span<const std::uint64_t> histogram) {
    std::uint64_t n = 0;
    for (auto c : histogram) n += c;
    return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// NodeModel
// ---------------------------------------------------------------------------

NodeModel::NodeModel(int num_classes) {
    if (num_classes < 1) throw std::invalid_argument("node model needs at least one class");
    class_stats_.resize(static_cast<std::size_t>(num_classes));
}

double NodeModel::score(const SparseVector& x) const noexcept {
    double s = bias_;
    for (const auto& f : x) {
        if (f.index < weights_.size()) s += weights_[f.index] * f.value;
    }
    return s;
}

Direction NodeModel::route(const SparseVector& x) const noexcept {
    return score(x) > 0.0 ? Direction::Right : Direction::Left;
}

int NodeModel::target(Label y) const {
    const auto& stat = class_stats_.at(label_slot(y, class_stats_.size()));
    if (total_count_ == 0) return +1;
    const double class_mean = stat.count == 0 ? 0.5 : stat.mean;
    return class_mean >= marginal_mean_ ? +1 : -1;
}

void NodeModel::update(const Example& ex, double lr) {
    const double b = static_cast<double>(target(ex.label));
    const double s = score(ex.features);

    // Closed-form squared-loss step: the score moves a fraction
    // 1 - exp(-lr * |x|^2) of the way to the target (bias counts as a
    // constant feature), so it never overshoots for any lr.
    double sq_norm = 1.0;
    for (const auto& f : ex.features) sq_norm += f.value * f.value;
    const double step = (b - s) * -std::expm1(-lr * sq_norm) / sq_norm;

    if (!ex.features.empty() && ex.features.back().index >= weights_.size()) {
        weights_.resize(static_cast<std::size_t>(ex.features.back().index) + 1, 0.0);
    }
    for (const auto& f : ex.features) weights_[f.index] += step * f.value;
    bias_ += step;

    const double indicator = score(ex.features) > 0.0 ? 1.0 : 0.0;
    auto& stat = class_stats_[label_slot(ex.label, class_stats_.size())];
    ++stat.count;
    stat.mean += (indicator - stat.mean) / static_cast<double>(stat.count);
    ++total_count_;
    marginal_mean_ += (indicator - marginal_mean_) / static_cast<double>(total_count_);
}

double NodeModel::weight(FeatureIndex index) const noexcept {
    return index < weights_.size() ? weights_[index] : 0.0;
}

void NodeModel::set_weight(FeatureIndex index, double w) {
    if (index == 0) throw std::invalid_argument("feature indices are 1-based");
    if (index >= weights_.size()) weights_.resize(static_cast<std::size_t>(index) + 1, 0.0);
    weights_[index] = w;
}

SparseVector NodeModel::nonzero_weights() const {
    SparseVector out;
    for (std::size_t i = 1; i < weights_.size(); ++i) {
        if (weights_[i] != 0.0) out.push_back({static_cast<FeatureIndex>(i), weights_[i]});
    }
    return out;
}

std::uint64_t NodeModel::class_count(Label y) const {
    return class_stats_.at(label_slot(y, class_stats_.size())).count;
}

double NodeModel::class_mean(Label y) const {
    return class_stats_.at(label_slot(y, class_stats_.size())).mean;
}

NodeModel node_update(NodeModel model, const Example& ex, double lr) {
    model.update(ex, lr);
    return model;
}

Direction route(const NodeModel& model, const SparseVector& x) noexcept { return model.route(x); }

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

Tree::Tree(int num_classes, std::vector<std::uint64_t> root_histogram, bool root_splittable)
    : num_classes_(num_classes) {
    if (num_classes < 1) throw std::invalid_argument("tree needs at least one class");
    if (root_histogram.size() != static_cast<std::size_t>(num_classes)) {
        throw std::invalid_argument("root histogram does not match the class count");
    }
    TreeNode root;
    root.id = 0;
    root.count = total(root_histogram);
    if (root.count == 0) throw std::invalid_argument("root histogram is empty");
    root.histogram = std::move(root_histogram);
    root.splittable = root_splittable;
    nodes_.push_back(std::move(root));
}

Tree Tree::from_nodes(int num_classes, std::vector<TreeNode> nodes) {
    if (nodes.empty()) throw std::invalid_argument("tree has no nodes");
    if (nodes.size() % 2 == 0) throw std::invalid_argument("a binary tree has an odd node count");
    const auto n = static_cast<NodeId>(nodes.size());
    std::vector<int> parent_refs(nodes.size(), 0);
    for (NodeId id = 0; id < n; ++id) {
        const auto& node = nodes[static_cast<std::size_t>(id)];
        if (node.id != id) throw std::invalid_argument("node ids must equal arena positions");
        if (node.histogram.size() != static_cast<std::size_t>(num_classes) ||
            total(node.histogram) != node.count || node.count == 0) {
            throw std::invalid_argument("node " + std::to_string(id) + " has a bad histogram");
        }
        if ((node.left == kNoNode) != (node.right == kNoNode)) {
            throw std::invalid_argument("node " + std::to_string(id) + " has one child");
        }
        if (node.left == kNoNode) continue;
        for (NodeId child : {node.left, node.right}) {
            if (child <= id || child >= n || nodes[static_cast<std::size_t>(child)].parent != id) {
                throw std::invalid_argument("node " + std::to_string(id) + " has a bad child link");
            }
            ++parent_refs[static_cast<std::size_t>(child)];
        }
        const auto& l = nodes[static_cast<std::size_t>(node.left)].histogram;
        const auto& r = nodes[static_cast<std::size_t>(node.right)].histogram;
        for (std::size_t c = 0; c < node.histogram.size(); ++c) {
            if (l[c] + r[c] != node.histogram[c]) {
                throw std::invalid_argument("children of node " + std::to_string(id) +
                                            " do not partition its examples");
            }
        }
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (parent_refs[i] != 1) throw std::invalid_argument("node is not reachable exactly once");
    }
    Tree tree;
    tree.num_classes_ = num_classes;
    tree.nodes_ = std::move(nodes);
    return tree;
}

std::uint64_t Tree::total_count() const { return empty() ? 0 : nodes_.front().count; }

std::vector<NodeId> Tree::leaves() const {
    std::vector<NodeId> out;
    for (const auto& node : nodes_) {
        if (node.is_leaf()) out.push_back(node.id);
    }
    return out;
}

double Tree::weight(NodeId id) const {
    return static_cast<double>(node(id).count) / static_cast<double>(total_count());
}

ClassDistribution Tree::distribution(NodeId id) const {
    return ClassDistribution::from_counts(std::span<const std::uint64_t>(node(id).histogram));
}

std::vector<WeightedLeaf> Tree::weighted_leaves() const {
    std::vector<WeightedLeaf> out;
    for (NodeId id : leaves()) out.push_back({weight(id), distribution(id)});
    return out;
}

double Tree::criterion(const CriterionKind& kind) const {
    const auto leaves = weighted_leaves();
    return tree_criterion(leaves, kind);
}

NodeId Tree::leaf_for(const SparseVector& x) const {
    if (empty()) throw std::invalid_argument("tree is empty");
    NodeId id = root();
    while (!node(id).is_leaf()) {
        const auto& n = node(id);
        id = n.model.route(x) == Direction::Right ? n.right : n.left;
    }
    return id;
}

std::pair<NodeId, NodeId> Tree::split(NodeId leaf, NodeModel model,
                                      std::vector<std::uint64_t> left_histogram,
                                      bool left_splittable,
                                      std::vector<std::uint64_t> right_histogram,
                                      bool right_splittable) {
    const TreeNode& parent = node(leaf);
    if (!parent.is_leaf()) throw std::invalid_argument("only leaves can be split");
    if (left_histogram.size() != parent.histogram.size() ||
        right_histogram.size() != parent.histogram.size()) {
        throw std::invalid_argument("child histograms do not match the class count");
    }
    for (std::size_t c = 0; c < parent.histogram.size(); ++c) {
        if (left_histogram[c] + right_histogram[c] != parent.histogram[c]) {
            throw std::invalid_argument("child histograms do not partition the leaf");
        }
    }
    if (total(left_histogram) == 0 || total(right_histogram) == 0) {
        throw std::invalid_argument("both children of a split must receive examples");
    }

    const auto make_child = [&](std::vector<std::uint64_t> histogram, bool splittable) {
        TreeNode child;
        child.id = static_cast<NodeId>(nodes_.size());
        child.parent = leaf;
        child.depth = node(leaf).depth + 1;
        child.count = total(histogram);
        child.histogram = std::move(histogram);
        child.splittable = splittable;
        nodes_.push_back(std::move(child));
        return nodes_.back().id;
    };
    const NodeId l = make_child(std::move(left_histogram), left_splittable);
    const NodeId r = make_child(std::move(right_histogram), right_splittable);
    TreeNode& p = mutable_node(leaf);
    p.left = l;
    p.right = r;
    p.model = std::move(model);
    p.splittable = false;
    return {l, r};
}

void Tree::mark_unsplittable(NodeId leaf) { mutable_node(leaf).splittable = false; }

std::optional<NodeId> split_next(const Tree& tree) {
    std::optional<NodeId> best;
    for (const auto& node : tree.nodes()) {
        if (!node.is_leaf() || !node.splittable) continue;
        // Ids increase along the scan, so a strict comparison keeps the
        // smallest id among equally heavy leaves.
        if (!best || node.count > tree.node(*best).count) best = node.id;
    }
    return best;
}

Label predict(const Tree& tree, const SparseVector& x) {
    const auto& hist = tree.node(tree.leaf_for(x)).histogram;
    const auto it = std::max_element(hist.begin(), hist.end());
    return static_cast<Label>(it - hist.begin()) + 1;
}

double evaluate(const Tree& tree, const Dataset& data) {
    if (tree.empty()) throw std::invalid_argument("cannot evaluate an empty tree");
    if (data.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
    std::size_t wrong = 0;
    for (const auto& ex : data.examples) {
        if (predict(tree, ex.features) != ex.label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (epochs_per_split < 1) throw std::invalid_argument("epochs per split must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (!(criterion_c > 2.0)) throw std::invalid_argument("modified gini needs C > 2");
    if (min_node_examples < 1) throw std::invalid_argument("min node examples must be positive");
}

namespace {

TraceRecord snapshot(const Tree& tree, long t, const CriterionKind& mgini, const Dataset* test) {
    TraceRecord rec;
    rec.t = t;
    rec.g_e = tree.criterion(CriterionKind::shannon());
    rec.g_g = tree.criterion(CriterionKind::gini());
    rec.g_m = tree.criterion(mgini);
    if (test != nullptr) rec.test_error = evaluate(tree, *test);
    return rec;
}

void check_split_invariants(const TraceRecord& before, const TraceRecord& after,
                            const SplitDecomposition& split, const CriterionKind& mgini) {
    const std::array<std::pair<double, double>, 3> series{
        {{before.g_e, after.g_e}, {before.g_g, after.g_g}, {before.g_m, after.g_m}}};
    for (const auto& [prev, next] : series) {
        if (next > prev + kTraceTolerance) {
            throw std::logic_error("tree criterion increased at split " + std::to_string(after.t));
        }
    }
    for (const auto& kind : {CriterionKind::shannon(), CriterionKind::gini(), mgini}) {
        if (split_delta(split, kind) < strong_concavity_lower_bound(split, kind) - kTraceTolerance) {
            throw std::logic_error("split " + std::to_string(after.t) + " breaks the " +
                                   kind.name() + " strong-concavity bound");
        }
    }
}

TrainResult run_training(const Dataset& data, const TrainConfig& config, const Dataset* test) {
    config.validate();
    if (data.empty()) throw std::invalid_argument("training dataset is empty");
    if (data.num_classes < 1) throw std::invalid_argument("training dataset has no classes");
    const auto k = static_cast<std::size_t>(data.num_classes);
    for (const auto& ex : data.examples) label_slot(ex.label, k);

    const auto mgini = CriterionKind::modified_gini(config.criterion_c);
    const auto splittable = [&](std::span<const std::uint64_t> hist) {
        return total(hist) >= config.min_node_examples && distinct(hist) >= 2;
    };

    TrainResult result;
    auto root_hist = data.class_counts();
    const bool root_ok = splittable(root_hist);
    result.tree = Tree(data.num_classes, std::move(root_hist), root_ok);
    result.trace.push_back(snapshot(result.tree, 0, mgini, test));
    if (data.distinct_labels() < 2) {
        result.warnings.push_back("training data has a single class; returning the root-only tree");
        return result;
    }

    Tree& tree = result.tree;
    std::vector<std::vector<std::size_t>> buffers(1);
    buffers[0].resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) buffers[0][i] = i;

    std::mt19937_64 rng(config.seed);
    while (tree.num_internal() < config.max_splits) {
        const auto next = split_next(tree);
        if (!next) break;
        const NodeId leaf = *next;

        auto& order = buffers[static_cast<std::size_t>(leaf)];
        NodeModel model(data.num_classes);
        for (int epoch = 0; epoch < config.epochs_per_split; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t i : order) model.update(data.examples[i], config.learning_rate);
        }

        std::vector<std::size_t> left_idx, right_idx;
        std::vector<std::uint64_t> left_hist(k, 0), right_hist(k, 0);
        for (std::size_t i : order) {
            const auto& ex = data.examples[i];
            const auto slot = static_cast<std::size_t>(ex.label - 1);
            if (model.route(ex.features) == Direction::Right) {
                right_idx.push_back(i);
                ++right_hist[slot];
            } else {
                left_idx.push_back(i);
                ++left_hist[slot];
            }
        }
        if (left_idx.empty() || right_idx.empty()) {
            tree.mark_unsplittable(leaf);
            continue;
        }

        const auto parent_dist = tree.distribution(leaf);
        const auto& parent_hist = tree.node(leaf).histogram;
        std::vector<double> conditionals(k, 0.0);
        for (std::size_t c = 0; c < k; ++c) {
            if (parent_hist[c] > 0) {
                conditionals[c] =
                    static_cast<double>(right_hist[c]) / static_cast<double>(parent_hist[c]);
            }
        }
        const auto stats = SplitStatistics::from_conditionals(parent_dist, std::move(conditionals));
        const double beta = static_cast<double>(right_idx.size()) / static_cast<double>(order.size());
        const SplitDecomposition decomposition(
            parent_dist, beta, ClassDistribution::from_counts(std::span<const std::uint64_t>(left_hist)),
            ClassDistribution::from_counts(std::span<const std::uint64_t>(right_hist)));

        const bool left_ok = splittable(left_hist);
        const bool right_ok = splittable(right_hist);
        const auto [l, r] = tree.split(leaf, std::move(model), std::move(left_hist), left_ok,
                                       std::move(right_hist), right_ok);
        buffers.resize(tree.num_nodes());
        buffers[static_cast<std::size_t>(l)] = std::move(left_idx);
        buffers[static_cast<std::size_t>(r)] = std::move(right_idx);
        buffers[static_cast<std::size_t>(leaf)] = {};

        TraceRecord rec = snapshot(tree, static_cast<long>(tree.num_internal()), mgini, test);
        rec.node = leaf;
        rec.j_value = objective_value(parent_dist, stats);
        rec.gamma_hat = empirical_gamma(parent_dist, stats).value;
        check_split_invariants(result.trace.back(), rec, decomposition, mgini);
        result.trace.push_back(rec);
    }
    return result;
}

}  // namespace

TrainResult train(const Dataset& data, const TrainConfig& config) {
    return run_training(data, config, nullptr);
}

TrainResult train(const Dataset& data, const TrainConfig& config, const Dataset& test) {
    return run_training(data, config, &test);
}

std::vector<TraceRecord> normalize_trace(std::span<const TraceRecord> records) {
    if (records.empty()) throw std::invalid_argument("trace is empty");
    const auto rescale = [](double x, double first) { return first == 0.0 ? 0.0 : x / first; };
    const TraceRecord first = records.front();
    const bool has_error = std::all_of(records.begin(), records.end(),
                                       [](const TraceRecord& r) { return r.test_error.has_value(); });

    std::vector<TraceRecord> out(records.begin(), records.end());
    for (auto& r : out) {
        r.g_e = rescale(r.g_e, first.g_e);
        r.g_g = rescale(r.g_g, first.g_g);
        r.g_m = rescale(r.g_m, first.g_m);
        if (has_error) {
            r.test_error = rescale(*r.test_error, *first.test_error);
        } else {
            r.test_error.reset();
        }
    }
    return out;
}

LearningRateSelection select_learning_rate(const Dataset& train_data, const Dataset& valid_data,
                                           TrainConfig config, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("learning-rate grid is empty");
    LearningRateSelection selection{grid.front(), {}};
    double best = 2.0;
    for (double lr : grid) {
        config.learning_rate = lr;
        const auto result = train(train_data, config);
        const double err = evaluate(result.tree, valid_data);
        selection.trials.push_back({lr, err});
        if (err < best) {
            best = err;
            selection.best_learning_rate = lr;
        }
    }
    return selection;
}

}  // namespace lomboost

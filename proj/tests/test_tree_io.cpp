#include "lomboost/learner.hpp"
#include "lomboost/tree_io.hpp"

#include <doctest.h>

#include <sstream>
#include <stdexcept>

using namespace lomboost;

namespace {

std::string dump(const Tree& tree) {
    std::ostringstream out;
    save_tree(out, tree);
    return out.str();
}

Tree load(const std::string& text) {
    std::istringstream in(text);
    return load_tree(in);
}

}  // namespace

TEST_CASE("trees survive a save/load cycle") {
    const auto d = synthetic_hierarchical(8, 16, 800, 0.3, 6);
    TrainConfig cfg;
    cfg.max_splits = 7;
    const auto tree = train(d, cfg).tree;
    const std::string text = dump(tree);
    CHECK(text.rfind("LOMBOOST-TREE 1\n", 0) == 0);
    const Tree back = load(text);
    CHECK(dump(back) == text);
    CHECK(back.num_nodes() == tree.num_nodes());
    for (const auto& ex : d.examples) REQUIRE(predict(back, ex.features) == predict(tree, ex.features));
    CHECK(back.criterion(CriterionKind::gini()) == tree.criterion(CriterionKind::gini()));
}

TEST_CASE("malformed tree files are rejected") {
    const auto d = synthetic_hierarchical(4, 4, 80, 0.1, 1);
    TrainConfig cfg;
    cfg.max_splits = 3;
    const std::string text = dump(train(d, cfg).tree);

    CHECK_THROWS_WITH(load(""), doctest::Contains("empty"));
    CHECK_THROWS_WITH(load("NOT-A-TREE 1\n"), doctest::Contains("magic"));
    std::string future = text;
    future.replace(future.find(" 1\n"), 3, " 9\n");
    CHECK_THROWS_WITH(load(future), doctest::Contains("version"));

    // A histogram that no longer sums to its children breaks the structure.
    std::string counts = text;
    const auto pos = counts.find("hist ");
    counts.replace(pos, 6, "hist 9");
    CHECK_THROWS(load(counts));

    CHECK_THROWS(load(text.substr(0, text.size() / 2)));
    CHECK_THROWS_AS(dump(Tree()), std::invalid_argument);
    CHECK_THROWS(load_tree_file("/nonexistent/tree"));
}

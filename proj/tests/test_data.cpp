#include "lomboost/data.hpp"
#include "lomboost/learner.hpp"
#include "lomboost/objective.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace lomboost;

namespace {

Dataset parse_text(const std::string& text, std::optional<int> k = std::nullopt) {
    std::istringstream in(text);
    return parse_sparse(in, k);
}

std::set<std::string> serialized(const Dataset& d) {
    std::set<std::string> lines;
    for (const auto& ex : d.examples) {
        Dataset one{{ex}, d.num_classes, d.num_features};
        std::ostringstream out;
        write_sparse(out, one);
        lines.insert(out.str());
    }
    return lines;
}

}  // namespace

TEST_CASE("parse a single line") {
    const auto d = parse_text("3 1:0.5 7:2\n");
    REQUIRE(d.size() == 1);
    CHECK(d.examples[0].label == 3);
    CHECK(d.examples[0].features == SparseVector{{1, 0.5}, {7, 2.0}});
    CHECK(d.num_classes == 3);
    CHECK(d.num_features == 7);
}

TEST_CASE("parse accepts CRLF, blank lines and a leading plus sign") {
    const auto d = parse_text("1 2:1.5\r\n\r\n+2 1:-3e-1 4:4\r\n");
    REQUIRE(d.size() == 2);
    CHECK(d.examples[1].label == 2);
    CHECK(d.examples[1].features[0].value == doctest::Approx(-0.3));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_WITH_AS(parse_text(""), doctest::Contains("no examples"), ParseError);
    CHECK_THROWS_AS(parse_text("0 1:1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("-1 1:1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("x 1:1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("1 3:1 2:1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("1 2:1 2:1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("1 0:1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("1 1:abc\n"), ParseError);
    CHECK_THROWS_AS(parse_text("1 1\n"), ParseError);
    try {
        parse_text("1 1:1\n2 1:x\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_text("5 1:1\n", 3), std::invalid_argument);
    CHECK_THROWS(parse_sparse_file("/nonexistent/file.svm"));
}

TEST_CASE("gap labels and round trip") {
    const auto d = parse_text("1 1:1\n5 2:0.25\n5 1:0.1 3:7\n");
    CHECK(d.num_classes == 5);
    CHECK(d.class_counts() == std::vector<std::uint64_t>{1, 0, 0, 0, 2});
    CHECK(d.distinct_labels() == 2);
    std::ostringstream out;
    write_sparse(out, d);
    CHECK(parse_text(out.str()) == d);

    const auto wide = parse_text("1 1:1\n", 8);
    CHECK(wide.num_classes == 8);
}

TEST_CASE("round trip of noisy synthetic data is exact") {
    const auto d = synthetic_hierarchical(8, 16, 200, 0.3, 4);
    const auto path = std::filesystem::temp_directory_path() / "lomboost_roundtrip.svm";
    write_sparse_file(path, d);
    CHECK(parse_sparse_file(path) == d);
    std::filesystem::remove(path);
    CHECK(fingerprint(d) == fingerprint(synthetic_hierarchical(8, 16, 200, 0.3, 4)));
    CHECK(fingerprint(d) != fingerprint(synthetic_hierarchical(8, 16, 200, 0.3, 5)));
}

TEST_CASE("split sizes follow the rounding rule") {
    const auto d = synthetic_hierarchical(4, 4, 100, 0.1, 1);
    const auto parts = split_dataset(d, SplitSpec{0.9, 0.1, 7});
    CHECK(parts.train.size() == 81);
    CHECK(parts.valid.size() == 9);
    CHECK(parts.test.size() == 10);
    CHECK(parts.test.num_classes == d.num_classes);
    CHECK(parts.train.num_features == d.num_features);

    const auto again = split_dataset(d, SplitSpec{0.9, 0.1, 7});
    CHECK(again.train == parts.train);
    CHECK(again.valid == parts.valid);
    CHECK(again.test == parts.test);
    CHECK_FALSE(split_dataset(d, SplitSpec{0.9, 0.1, 8}).test == parts.test);

    CHECK_THROWS_AS(split_dataset(synthetic_hierarchical(2, 2, 5, 0.0, 1), SplitSpec{}),
                    std::invalid_argument);
}

TEST_CASE("splits are disjoint, covering and keep class proportions") {
    // Every part holds at least 1000 examples.
    const auto d = synthetic_hierarchical(5, 8, 12000, 0.5, 3);
    const auto parts = split_dataset(d, SplitSpec{0.9, 0.1, 11});
    CHECK(parts.train.size() + parts.valid.size() + parts.test.size() == d.size());
    auto all = serialized(d);
    auto tr = serialized(parts.train), va = serialized(parts.valid), te = serialized(parts.test);
    CHECK(tr.size() + va.size() + te.size() == all.size());
    std::set<std::string> joined(tr);
    joined.insert(va.begin(), va.end());
    joined.insert(te.begin(), te.end());
    CHECK(joined == all);

    const auto global = d.class_counts();
    for (const Dataset* part : {&parts.train, &parts.valid, &parts.test}) {
        const auto counts = part->class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            const double share = static_cast<double>(counts[c]) / static_cast<double>(part->size());
            const double expected = static_cast<double>(global[c]) / static_cast<double>(d.size());
            CHECK(std::fabs(share - expected) <= 0.05);
        }
    }
}

TEST_CASE("noise-free synthetic data") {
    const auto d = synthetic_hierarchical(4, 6, 40, 0.0, 9);
    CHECK(d.num_classes == 4);
    CHECK(d.num_features == 6);
    CHECK(d.class_counts() == std::vector<std::uint64_t>{10, 10, 10, 10});
    for (const auto& ex : d.examples) {
        REQUIRE(ex.features.size() == 1);
        CHECK(ex.features[0].index == static_cast<FeatureIndex>(ex.label));
        CHECK(ex.features[0].value == 1.0);
    }
    CHECK_THROWS_AS(synthetic_hierarchical(8, 4, 10, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synthetic_hierarchical(2, 4, 10, -1.0, 1), std::invalid_argument);
}

TEST_CASE("a coordinate threshold gives a perfect root split on noise-free data") {
    for (int k : {2, 4, 8, 32}) {
        const auto d = synthetic_hierarchical(k, static_cast<FeatureIndex>(k), 20 * k, 0.0, 2);
        NodeModel h(k);
        for (int c = 1; c <= k / 2; ++c) h.set_weight(static_cast<FeatureIndex>(c), 1.0);
        h.set_bias(-0.5);
        std::vector<double> right(k, 0.0), count(k, 0.0);
        for (const auto& ex : d.examples) {
            count[ex.label - 1] += 1.0;
            if (h.route(ex.features) == Direction::Right) right[ex.label - 1] += 1.0;
        }
        std::vector<double> p(k);
        for (int c = 0; c < k; ++c) p[c] = right[c] / count[c];
        auto pi = ClassDistribution::from_counts(std::span<const double>(count));
        CHECK(objective_value(pi, SplitStatistics::from_conditionals(pi, p)) == doctest::Approx(1.0));
    }
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lomboost {

using FeatureIndex = std::uint32_t;
using Label = int;

struct Feature {
    FeatureIndex index;  // 1-based
    double value;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// Features sorted by strictly increasing index.
using SparseVector = std::vector<Feature>;

struct Example {
    SparseVector features;
    Label label;  // 1-based, in {1..k}

    friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
    std::vector<Example> examples;
    int num_classes = 0;
    FeatureIndex num_features = 0;

    std::size_t size() const noexcept { return examples.size(); }
    bool empty() const noexcept { return examples.empty(); }
    /// counts[c] for c in 0..k-1 holds the number of examples with label c+1.
    std::vector<std::uint64_t> class_counts() const;
    /// Number of labels with at least one example.
    int distinct_labels() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Reads "LABEL INDEX:VALUE ..." lines (LF or CRLF). Blank lines are skipped.
/// k and d are the largest label and index unless `num_classes` overrides k.
Dataset parse_sparse(std::istream& in, std::optional<int> num_classes = std::nullopt);
Dataset parse_sparse_file(const std::filesystem::path& path,
                          std::optional<int> num_classes = std::nullopt);

/// Writes the same format with shortest round-trip decimal values.
void write_sparse(std::ostream& out, const Dataset& data);
void write_sparse_file(const std::filesystem::path& path, const Dataset& data);

/// 64-bit FNV-1a hash of the serialized dataset.
std::uint64_t fingerprint(const Dataset& data);

struct SplitSpec {
    double train_frac = 0.9;
    double valid_frac_of_train = 0.1;
    std::uint64_t seed = 1;
};

struct DatasetSplit {
    Dataset train;
    Dataset valid;
    Dataset test;
};

/// Seeded shuffle followed by contiguous cuts. With n examples the held-out
/// test part has n - round(train_frac n) examples and validation takes
/// round(valid_frac_of_train * round(train_frac n)) of the rest. Every part
/// keeps the parent's k and d. Throws for fewer than 10 examples.
DatasetSplit split_dataset(const Dataset& data, const SplitSpec& spec);

/// Balanced k-class data in d dimensions: example j has label (j mod k) + 1
/// and features e_label + noise * N(0, I). With noise = 0 only the class
/// coordinate is stored. Requires k <= d.
Dataset synthetic_hierarchical(int k, FeatureIndex d, std::size_t n, double noise,
                               std::uint64_t seed);

}  // namespace lomboost

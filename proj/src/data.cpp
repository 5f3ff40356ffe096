#include "lomboost/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

namespace lomboost {

namespace {

template <typename T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;  // from_chars rejects a leading '+'
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

std::string serialize(const Dataset& data) {
    std::string out;
    for (const auto& ex : data.examples) {
        out += std::to_string(ex.label);
        for (const auto& f : ex.features) {
            out += ' ';
            out += std::to_string(f.index);
            out += ':';
            append_double(out, f.value);
        }
        out += '\n';
    }
    return out;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> order) {
    Dataset out;
    out.num_classes = data.num_classes;
    out.num_features = data.num_features;
    out.examples.reserve(order.size());
    for (std::size_t i : order) out.examples.push_back(data.examples[i]);
    return out;
}

}  // namespace

std::vector<std::uint64_t> Dataset::class_counts() const {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
    for (const auto& ex : examples) ++counts.at(static_cast<std::size_t>(ex.label - 1));
    return counts;
}

int Dataset::distinct_labels() const {
    const auto counts = class_counts();
    return static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                          [](std::uint64_t c) { return c > 0; }));
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

Dataset parse_sparse(std::istream& in, std::optional<int> num_classes) {
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = split_whitespace(line);
        if (tokens.empty()) continue;

        Example ex;
        if (!parse_number(tokens[0], ex.label)) {
            throw ParseError(line_no, "label '" + std::string(tokens[0]) + "' is not an integer");
        }
        if (ex.label <= 0) {
            throw ParseError(line_no, "label must be positive, got " + std::to_string(ex.label));
        }
        ex.features.reserve(tokens.size() - 1);
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto token = tokens[t];
            const auto colon = token.find(':');
            if (colon == std::string_view::npos) {
                throw ParseError(line_no, "expected INDEX:VALUE, got '" + std::string(token) + "'");
            }
            Feature f{};
            if (!parse_number(token.substr(0, colon), f.index) || f.index == 0) {
                throw ParseError(line_no, "feature index must be a positive integer in '" +
                                              std::string(token) + "'");
            }
            if (!parse_number(token.substr(colon + 1), f.value) || !std::isfinite(f.value)) {
                throw ParseError(line_no, "non-numeric feature value in '" + std::string(token) + "'");
            }
            if (!ex.features.empty() && f.index <= ex.features.back().index) {
                throw ParseError(line_no, "feature indices must be strictly increasing");
            }
            ex.features.push_back(f);
        }
        data.num_classes = std::max(data.num_classes, ex.label);
        if (!ex.features.empty()) {
            data.num_features = std::max(data.num_features, ex.features.back().index);
        }
        data.examples.push_back(std::move(ex));
    }
    if (data.examples.empty()) throw ParseError(line_no, "no examples");
    if (num_classes) {
        if (*num_classes < data.num_classes) {
            throw std::invalid_argument("class count override " + std::to_string(*num_classes) +
                                        " is below the largest label " +
                                        std::to_string(data.num_classes));
        }
        data.num_classes = *num_classes;
    }
    return data;
}

Dataset parse_sparse_file(const std::filesystem::path& path, std::optional<int> num_classes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_sparse(in, num_classes);
}

void write_sparse(std::ostream& out, const Dataset& data) { out << serialize(data); }

void write_sparse_file(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_sparse(out, data);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::uint64_t fingerprint(const Dataset& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize(data)) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

DatasetSplit split_dataset(const Dataset& data, const SplitSpec& spec) {
    if (!(spec.train_frac > 0.0 && spec.train_frac < 1.0) ||
        !(spec.valid_frac_of_train > 0.0 && spec.valid_frac_of_train < 1.0)) {
        throw std::invalid_argument("split fractions must lie in (0, 1)");
    }
    const std::size_t n = data.size();
    if (n < 10) {
        throw std::invalid_argument("dataset too small to split: " + std::to_string(n) +
                                    " examples (need at least 10)");
    }
    const auto n_trainval = static_cast<std::size_t>(std::llround(spec.train_frac * double(n)));
    const auto n_valid =
        static_cast<std::size_t>(std::llround(spec.valid_frac_of_train * double(n_trainval)));
    const std::size_t n_train = n_trainval - n_valid;
    if (n_train == 0 || n_valid == 0 || n_trainval >= n) {
        throw std::invalid_argument("split fractions leave an empty partition");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::span<const std::size_t> all(order);
    return {subset(data, all.subspan(0, n_train)), subset(data, all.subspan(n_train, n_valid)),
            subset(data, all.subspan(n_trainval))};
}

Dataset synthetic_hierarchical(int k, FeatureIndex d, std::size_t n, double noise,
                               std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("class count must be positive");
    if (static_cast<FeatureIndex>(k) > d) {
        throw std::invalid_argument("class count " + std::to_string(k) +
                                    " exceeds the dimension " + std::to_string(d));
    }
    if (!(noise >= 0.0)) throw std::invalid_argument("noise scale must be non-negative");

    Dataset data;
    data.num_classes = k;
    data.num_features = d;
    data.examples.reserve(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        Example ex;
        ex.label = static_cast<Label>(j % static_cast<std::size_t>(k)) + 1;
        const auto hot = static_cast<FeatureIndex>(ex.label);
        if (noise == 0.0) {
            ex.features.push_back({hot, 1.0});
        } else {
            ex.features.reserve(d);
            for (FeatureIndex i = 1; i <= d; ++i) {
                const double base = i == hot ? 1.0 : 0.0;
                ex.features.push_back({i, base + noise * gauss(rng)});
            }
        }
        data.examples.push_back(std::move(ex));
    }
    return data;
}

}  // namespace lomboost

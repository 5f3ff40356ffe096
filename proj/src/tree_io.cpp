#include "lomboost/tree_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lomboost {

namespace {

constexpr const char* kMagic = "LOMBOOST-TREE";

std::string exact(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& token) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw std::runtime_error("tree file: bad number '" + token + "'");
    }
    return v;
}

std::istringstream expect_line(std::istream& in, const std::string& keyword) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("tree file: missing '" + keyword + "'");
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head != keyword) {
        throw std::runtime_error("tree file: expected '" + keyword + "', got '" + head + "'");
    }
    return fields;
}

}  // namespace

void save_tree(std::ostream& out, const Tree& tree) {
    if (tree.empty()) throw std::invalid_argument("cannot save an empty tree");
    out << kMagic << ' ' << kTreeFormatVersion << '\n';
    out << "classes " << tree.num_classes() << '\n';
    out << "nodes " << tree.num_nodes() << '\n';
    for (const auto& node : tree.nodes()) {
        out << "node " << node.id << ' ' << node.parent << ' ' << node.left << ' ' << node.right
            << ' ' << node.depth << ' ' << (node.splittable ? 1 : 0) << '\n';
        out << "hist";
        for (auto c : node.histogram) out << ' ' << c;
        out << '\n';
        const auto weights = node.model.nonzero_weights();
        out << "router " << exact(node.model.bias()) << ' ' << weights.size();
        for (const auto& w : weights) out << ' ' << w.index << ':' << exact(w.value);
        out << '\n';
    }
}

Tree load_tree(std::istream& in) {
    std::string magic;
    int version = 0;
    {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("tree file is empty");
        std::istringstream fields(line);
        fields >> magic >> version;
    }
    if (magic != kMagic) throw std::runtime_error("not a tree file (bad magic header)");
    if (version != kTreeFormatVersion) {
        throw std::runtime_error("unsupported tree format version " + std::to_string(version));
    }
    int num_classes = 0;
    std::size_t count = 0;
    expect_line(in, "classes") >> num_classes;
    expect_line(in, "nodes") >> count;
    if (num_classes < 1 || count == 0) throw std::runtime_error("tree file: bad header counts");

    std::vector<TreeNode> nodes(count);
    for (auto& node : nodes) {
        int splittable = 0;
        auto header = expect_line(in, "node");
        header >> node.id >> node.parent >> node.left >> node.right >> node.depth >> splittable;
        if (!header) throw std::runtime_error("tree file: malformed node line");
        node.splittable = splittable != 0;

        auto hist = expect_line(in, "hist");
        node.histogram.resize(static_cast<std::size_t>(num_classes));
        for (auto& c : node.histogram) hist >> c;
        if (!hist) throw std::runtime_error("tree file: malformed histogram");
        node.count = 0;
        for (auto c : node.histogram) node.count += c;

        auto router = expect_line(in, "router");
        std::string bias;
        std::size_t nnz = 0;
        router >> bias >> nnz;
        if (!router) throw std::runtime_error("tree file: malformed router");
        node.model = NodeModel(num_classes);
        node.model.set_bias(parse_double(bias));
        for (std::size_t i = 0; i < nnz; ++i) {
            std::string token;
            router >> token;
            const auto colon = token.find(':');
            if (colon == std::string::npos) throw std::runtime_error("tree file: malformed weight");
            const auto index = static_cast<FeatureIndex>(std::stoul(token.substr(0, colon)));
            node.model.set_weight(index, parse_double(token.substr(colon + 1)));
        }
    }
    try {
        return Tree::from_nodes(num_classes, std::move(nodes));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("tree file: ") + e.what());
    }
}

void save_tree_file(const std::filesystem::path& path, const Tree& tree) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    save_tree(out, tree);
}

Tree load_tree_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load_tree(in);
}

}  // namespace lomboost

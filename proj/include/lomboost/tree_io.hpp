#pragma once

#include "lomboost/learner.hpp"

#include <filesystem>
#include <iosfwd>

namespace lomboost {

/// Text tree format, first line "LOMBOOST-TREE <version>". Routers keep their
/// weights and bias; the online routing statistics are not stored.
inline constexpr int kTreeFormatVersion = 1;

void save_tree(std::ostream& out, const Tree& tree);
Tree load_tree(std::istream& in);

void save_tree_file(const std::filesystem::path& path, const Tree& tree);
Tree load_tree_file(const std::filesystem::path& path);

}  // namespace lomboost

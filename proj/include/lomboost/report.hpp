#pragma once

#include "lomboost/learner.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lomboost {

inline constexpr const char* kTraceHeader = "t,node,j,gamma_hat,entropy,gini,modified_gini,test_error";
inline constexpr const char* kCurvesHeader = "t,entropy,gini,modified_gini,test_error";

/// Decimal with 9 significant digits ("%.9g").
std::string format_decimal(double v);

/// Per-split trace; test_error is left empty when absent.
std::string trace_csv(std::span<const TraceRecord> records);
std::vector<TraceRecord> parse_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

/// Normalized curves (normalize_trace applied to `records`).
std::string curves_csv(std::span<const TraceRecord> records);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace lomboost

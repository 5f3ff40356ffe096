#include "lomboost/report.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace lomboost {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double to_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

}  // namespace

std::string format_decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string trace_csv(std::span<const TraceRecord> records) {
    std::string out = std::string(kTraceHeader) + '\n';
    for (const auto& r : records) {
        out += std::to_string(r.t) + ',' + std::to_string(r.node) + ',' + format_decimal(r.j_value) +
               ',' + format_decimal(r.gamma_hat) + ',' + format_decimal(r.g_e) + ',' +
               format_decimal(r.g_g) + ',' + format_decimal(r.g_m) + ',' +
               (r.test_error ? format_decimal(*r.test_error) : std::string()) + '\n';
    }
    return out;
}

std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) throw std::runtime_error("trace has an unexpected header: " + line);
    std::vector<TraceRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) {
            throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected 8 fields");
        }
        TraceRecord r;
        r.t = static_cast<long>(to_double(f[0], line_no));
        r.node = static_cast<NodeId>(to_double(f[1], line_no));
        r.j_value = to_double(f[2], line_no);
        r.gamma_hat = to_double(f[3], line_no);
        r.g_e = to_double(f[4], line_no);
        r.g_g = to_double(f[5], line_no);
        r.g_m = to_double(f[6], line_no);
        if (!f[7].empty()) r.test_error = to_double(f[7], line_no);
        records.push_back(r);
    }
    if (records.empty()) throw std::runtime_error("trace has no records");
    return records;
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace " + path.string());
    return parse_trace_csv(in);
}

std::string curves_csv(std::span<const TraceRecord> records) {
    const auto normalized = normalize_trace(records);
    std::string out = std::string(kCurvesHeader) + '\n';
    for (const auto& r : normalized) {
        out += std::to_string(r.t) + ',' + format_decimal(r.g_e) + ',' + format_decimal(r.g_g) + ',' +
               format_decimal(r.g_m) + ',' +
               (r.test_error ? format_decimal(*r.test_error) : std::string()) + '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace lomboost

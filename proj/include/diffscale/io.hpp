#pragma once

/**
 * @file io.hpp
 * @brief CSV and JSON output at 17 significant digits, CSV input with line
 *        diagnostics, and output-path resolution.
 */

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "diffscale/core.hpp"

namespace diffscale {

using Json = nlohmann::ordered_json;

/// Real number with 17 significant digits; inf and nan spelled out.
inline std::string format_real(long double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", x);
    return buf;
}

/// JSON number, or a string for non-finite values.
inline Json json_real(long double x) {
    if (!std::isfinite(x)) return format_real(x);
    return static_cast<double>(x);
}

/// In-memory CSV table written in one go.
class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw Error("CSV row width does not match header");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    std::string str() const {
        std::ostringstream os;
        write_line(os, header_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

   private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << "\n";
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Numeric CSV with a header row.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<long double>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

/// Parses numeric CSV; errors name the offending line.
inline CsvData parse_csv(std::istream& in, const std::string& source = "input") {
    CsvData d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (d.header.empty()) {
            d.header = cells;
            continue;
        }
        if (cells.size() != d.header.size())
            throw Error(source + ": line " + std::to_string(lineno) + ": expected " + std::to_string(d.header.size()) + " fields, found " +
                        std::to_string(cells.size()));
        std::vector<long double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            long double v = std::strtold(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size())
                throw Error(source + ": line " + std::to_string(lineno) + ": not a number: '" + c + "'");
            row.push_back(v);
        }
        d.rows.push_back(std::move(row));
    }
    if (d.header.empty()) throw Error(source + ": empty CSV");
    return d;
}

inline CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_csv(in, path);
}

/// Relative paths resolve under DIFFSCALE_OUTPUT_DIR when it is set.
inline std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path == "-") return path;
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("DIFFSCALE_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    return p.string();
}

/// Writes text to the resolved path, or to stdout for "" and "-".
inline void write_output(const std::string& path, const std::string& text) {
    auto resolved = resolve_output_path(path);
    if (resolved.empty() || resolved == "-") {
        std::cout << text;
        return;
    }
    auto parent = std::filesystem::path(resolved).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(resolved, std::ios::binary);
    if (!out) throw Error("cannot write " + resolved);
    out << text;
}

}  // namespace diffscale

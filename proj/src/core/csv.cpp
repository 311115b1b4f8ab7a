#include "core/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace polyinv::csv {

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    fail(ErrorCode::parse, "csv: no column named '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // Trim surrounding whitespace.
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? std::string()
                                                    : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "csv: cannot open " + path.string());
    Table table;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::parse, "csv: empty file " + path.string());
    table.header = split_line(line);
    if (table.header.empty()) fail(ErrorCode::parse, "csv: missing header in " + path.string());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (fields.size() != table.header.size()) {
            fail(ErrorCode::parse, "csv: line " + std::to_string(line_no) + " of " + path.string() +
                                       " has " + std::to_string(fields.size()) + " fields, expected " +
                                       std::to_string(table.header.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto& f = fields[i];
            const auto result = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (result.ec != std::errc{} || result.ptr != f.data() + f.size()) {
                fail(ErrorCode::parse, "csv: line " + std::to_string(line_no) + " of " +
                                           path.string() + ": cannot parse '" + f + "' as a number");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string format_double(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "csv: cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            fail(ErrorCode::dimension_mismatch, "csv: row width differs from header width");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    if (!out) fail(ErrorCode::io, "csv: write failed for " + path.string());
}

}  // namespace polyinv::csv

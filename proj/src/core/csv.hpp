// Minimal numeric CSV reader/writer. All files this project exchanges are
// rectangular tables of doubles with a single header line.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace polyinv::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t n_cols() const noexcept { return header.size(); }
    // Index of a named column; throws if absent.
    std::size_t column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);

// Writes with round-trip-exact double formatting so reruns are byte-identical.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

std::string format_double(double value);

}  // namespace polyinv::csv

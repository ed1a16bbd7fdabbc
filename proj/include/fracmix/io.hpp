#pragma once

// Deterministic serialization: JSON with every double printed to 17
// significant digits (non-finite values become null), and comma-separated
// CSV with a header row and LF line endings.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracmix {

using Json = nlohmann::ordered_json;

std::string format_double(double v);

void write_json(std::ostream& os, const Json& doc);
void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    // Optional text cells: when text[c] is non-empty, column c is written from it.
    std::vector<std::vector<std::string>> text;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    /// Column by header name; InputError when absent.
    const std::vector<double>& column(const std::string& name) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
/// Numeric CSV with one header row. Throws InputError on malformed content.
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace fracmix

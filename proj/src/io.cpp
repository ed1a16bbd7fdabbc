#include "fracmix/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fracmix/errors.hpp"

namespace fracmix {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "nan";
    if (v == 0.0) return std::signbit(v) ? "-0" : "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(std::ostream& os, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << Json(it.key()).dump() << ": ";
                emit(os, it.value(), depth + 1);
            }
            os << "\n" << close_pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Arrays of scalars stay on one line; nested structures get one entry per line.
            bool scalar = true;
            for (const auto& v : j) scalar = scalar && !v.is_structured();
            if (scalar) {
                os << "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << ", ";
                    emit(os, j[i], depth + 1);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                emit(os, j[i], depth + 1);
            }
            os << "\n" << close_pad << "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v)) os << format_double(v);
            else os << "null";
            return;
        }
        default:
            os << j.dump();
            return;
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::InputError, "cannot open " + path.string() + " for writing");
    return os;
}

}  // namespace

void write_json(std::ostream& os, const Json& doc) {
    emit(os, doc, 0);
    os << "\n";
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    auto os = open_out(path);
    write_json(os, doc);
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::InputError, "cannot open " + path.string());
    try {
        return Json::parse(is);
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::InputError, path.string() + ": " + ex.what());
    }
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return columns[i];
    }
    fail(ErrorCode::InputError, "CSV has no column '" + name + "'");
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) os << ',';
        os << table.header[c];
    }
    os << '\n';
    const std::size_t n = table.rows();
    for (const auto& col : table.columns) {
        require(col.size() == n, ErrorCode::InvalidArgument, "CSV columns differ in length");
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) os << ',';
            if (c < table.text.size() && !table.text[c].empty()) os << table.text[c][r];
            else os << format_double(table.columns[c][r]);
        }
        os << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
    auto os = open_out(path);
    write_csv(os, table);
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::InputError, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    auto trim = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        std::size_t i = 0;
        while (i < s.size() && s[i] == ' ') ++i;
        return s.substr(i);
    };
    if (!std::getline(is, line)) fail(ErrorCode::InputError, path.string() + " is empty");
    {
        std::stringstream ss(trim(line));
        std::string cell;
        while (std::getline(ss, cell, ',')) table.header.push_back(trim(cell));
    }
    table.columns.assign(table.header.size(), {});
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (c >= table.columns.size() || res.ec != std::errc() ||
                res.ptr != cell.data() + cell.size()) {
                fail(ErrorCode::InputError,
                     path.string() + ": bad value '" + cell + "' on line " + std::to_string(row));
            }
            table.columns[c++].push_back(v);
        }
        if (c != table.columns.size()) {
            fail(ErrorCode::InputError, path.string() + ": wrong column count on line " + std::to_string(row));
        }
    }
    return table;
}

}  // namespace fracmix

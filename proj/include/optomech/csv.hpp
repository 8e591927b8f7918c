#pragma once

#include <array>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "optomech/errors.hpp"
#include "optomech/observables.hpp"
#include "optomech/sweep.hpp"

// Sweep tables as CSV: '#'-prefixed metadata lines, one header line, then one
// row per axis point. Unstable rows leave every observable cell empty.
namespace optomech {

inline const std::array<const char*, 16>& csv_columns() {
    static const std::array<const char*, 16> cols{
        "axis_value", "lambda_wm", "stable",  "n1",       "n2",       "s_db_b1",
        "s_db_b2",    "s_db_b1_opt", "s_db_b2_opt", "en_a_b1", "en_a_b2", "en_b1_b2",
        "en_a_b1b2",  "en_b1_ab2", "en_b2_ab1", "r_min",
    };
    return cols;
}

// Shortest decimal string that parses back to the same double.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc{}) {
        throw InvalidArgument("format_number: conversion failed");
    }
    return std::string(buf.data(), res.ptr);
}

inline double parse_number(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InvalidArgument("parse_number: '" + std::string(s) + "' is not a number");
    }
    return v;
}

inline std::string csv_header() {
    std::string out;
    for (std::size_t i = 0; i < csv_columns().size(); ++i) {
        if (i) out += ',';
        out += csv_columns()[i];
    }
    return out;
}

inline std::string csv_row(const SweepRow& row) {
    std::string out = format_number(row.axis_value) + ',' + format_number(row.lambda_wm) + ',' +
                      (row.stable ? "1" : "0");
    if (!row.observables) {
        for (std::size_t i = 3; i < csv_columns().size(); ++i) {
            out += ',';
        }
        return out;
    }
    const auto& o = *row.observables;
    for (double v : {o.n1, o.n2, o.s_db_b1, o.s_db_b2, o.s_db_b1_opt, o.s_db_b2_opt, o.en_a_b1,
                     o.en_a_b2, o.en_b1_b2, o.en_one_vs_two[0], o.en_one_vs_two[1],
                     o.en_one_vs_two[2], o.r_min}) {
        out += ',';
        out += format_number(v);
    }
    return out;
}

/// Writes metadata comments, header and rows. Each metadata entry becomes one
/// "# " line; entries must not contain newlines.
inline void write_csv(std::ostream& out, const SweepResult& result,
                      const std::vector<std::string>& metadata = {}) {
    out << "# optomech " << result.metadata.version << '\n';
    out << "# timestamp: " << result.metadata.timestamp << '\n';
    out << "# curve: " << result.spec.name << '\n';
    out << "# axis: " << result.spec.axis << '\n';
    for (const auto& m : metadata) {
        if (m.find('\n') != std::string::npos) {
            throw InvalidArgument("write_csv: metadata line contains a newline");
        }
        out << "# " << m << '\n';
    }
    out << csv_header() << '\n';
    for (const auto& row : result.rows) {
        out << csv_row(row) << '\n';
    }
}

struct CsvTable {
    std::vector<std::string> comments; // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw InvalidArgument("CsvTable: no column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        if (t.header.empty()) {
            t.header = split_csv_line(line);
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size()) {
            throw InvalidArgument("read_csv: row width does not match header");
        }
        std::vector<std::optional<double>> row;
        for (const auto& c : cells) {
            row.push_back(c.empty() ? std::nullopt : std::optional<double>(parse_number(c)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace optomech

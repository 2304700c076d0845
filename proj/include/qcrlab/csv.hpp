#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "iv_fit.hpp"
#include "spectroscopy.hpp"
#include "units.hpp"

namespace qcrlab::csv {

/// Column table with '#'-prefixed metadata lines written before the header.
struct Table {
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write(std::ostream& out, const Table& table) {
    for (const auto& m : table.metadata) out << "# " << m << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i]);
        out << '\n';
    }
}

/// Parses numeric CSV text whose first non-comment line must name exactly
/// `expected` columns.
inline std::vector<std::vector<double>> parse_columns(std::string_view text,
                                                      const std::vector<std::string>& expected) {
    std::istringstream in{std::string(text)};
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> cols(expected.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Tolerate a UTF-8 byte-order mark on the first line.
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        std::string_view view = units::trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            fields.push_back(units::trim(view.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!header_seen) {
            bool ok = fields.size() == expected.size();
            for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fields[i] == expected[i];
            if (!ok) {
                std::string want;
                for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
                throw Error(ErrorCode::InvalidArgument,
                            "line " + std::to_string(line_no) + ": expected header '" + want + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != expected.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        "line " + std::to_string(line_no) + ": expected " + std::to_string(expected.size()) +
                            " fields");
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                cols[i].push_back(units::parse_number(fields[i]));
            } catch (const Error& e) {
                throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    if (!header_seen) throw Error(ErrorCode::InvalidArgument, "missing CSV header");
    return cols;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline const std::vector<std::string> kIvColumns = {"v_dc_volts", "current_amps"};
inline const std::vector<std::string> kSpectrumColumns = {"detuning_hz", "magnitude"};

inline IvDataset parse_iv(std::string_view text) {
    auto cols = parse_columns(text, kIvColumns);
    IvDataset d;
    d.v_dc = std::move(cols[0]);
    d.current = std::move(cols[1]);
    d.validate();
    return d;
}

inline SpectrumTrace parse_spectrum(std::string_view text) {
    auto cols = parse_columns(text, kSpectrumColumns);
    SpectrumTrace t;
    t.detuning = std::move(cols[0]);
    t.magnitude = std::move(cols[1]);
    t.validate();
    return t;
}

inline Table iv_table(const IvDataset& d) {
    Table t;
    t.columns = kIvColumns;
    for (std::size_t i = 0; i < d.v_dc.size(); ++i) t.rows.push_back({d.v_dc[i], d.current[i]});
    return t;
}

inline Table spectrum_table(const SpectrumTrace& s) {
    Table t;
    t.columns = kSpectrumColumns;
    for (std::size_t i = 0; i < s.detuning.size(); ++i) t.rows.push_back({s.detuning[i], s.magnitude[i]});
    return t;
}

}  // namespace qcrlab::csv

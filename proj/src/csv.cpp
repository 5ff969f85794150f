// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>

#include "popest/error.hpp"

namespace popest::csv {

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<std::string> split(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", lineno);
    fields.push_back(std::move(cur));
    return fields;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::optional<std::size_t> Table::find_column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::size_t Table::column(const std::string& name) const {
    if (auto idx = find_column(name)) return *idx;
    throw ParseError("missing CSV column '" + name + "'", 1);
}

Table read(std::istream& in) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split(line, lineno);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        t.rows.push_back(std::move(fields));
        t.lines.push_back(lineno);
    }
    if (!have_header) throw ParseError("empty CSV input: missing header");
    return t;
}

double parse_real(const std::string& field, std::size_t lineno, const std::string& column) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ParseError("column '" + column + "': not a real number: '" + field + "'", lineno);
    return v;
}

long parse_integer(const std::string& field, std::size_t lineno, const std::string& column) {
    long v = 0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end)
        throw ParseError("column '" + column + "': not an integer: '" + field + "'", lineno);
    return v;
}

} // namespace popest::csv

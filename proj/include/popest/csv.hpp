// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace popest::csv {

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(const std::string& field);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split(const std::string& line, std::size_t lineno = 0);

/// Fixed-point formatting with `decimals` digits; never prints "-0.000".
std::string fixed(double value, int decimals);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  ///< source line of each row

    /// Column index by name; throws ParseError naming the missing column.
    std::size_t column(const std::string& name) const;
    std::optional<std::size_t> find_column(const std::string& name) const;
};

/// Reads a header plus records; blank lines are skipped, every row must match
/// the header width.
Table read(std::istream& in);

double parse_real(const std::string& field, std::size_t lineno, const std::string& column);
long parse_integer(const std::string& field, std::size_t lineno, const std::string& column);

} // namespace popest::csv

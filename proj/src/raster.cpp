// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/raster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace popest {

void GridGeoref::validate() const {
    if (ncols < 1 || nrows < 1)
        throw InvalidArgument("grid must have at least one row and one column");
    if (!(cellsize > 0.0) || !std::isfinite(cellsize))
        throw InvalidArgument("cellsize must be positive");
    if (!std::isfinite(xll) || !std::isfinite(yll))
        throw InvalidArgument("grid origin must be finite");
}

Grid mask_to_grid(const GridGeoref& georef, const Mask& mask, const Mask& valid) {
    Grid::Values v = valid.select(mask.cast<double>(), kDefaultNodata);
    return Grid(georef, std::move(v), kDefaultNodata);
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

bool parse_double(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

bool starts_numeric(std::string_view tok) {
    if (tok.empty()) return false;
    const char ch = tok.front();
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '.';
}

void format_double(std::ostream& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
}

} // namespace

Grid read_ascii_grid(std::istream& in) {
    std::map<std::string, std::pair<double, std::size_t>> header;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string_view> toks;
    bool have_body_line = false;

    while (std::getline(in, line)) {
        ++lineno;
        toks = split_ws(line);
        if (toks.empty()) continue;
        if (starts_numeric(toks.front())) {
            have_body_line = true;
            break;
        }
        if (toks.size() != 2)
            throw ParseError("malformed header line, expected '<key> <value>'", lineno);
        const std::string key = lower(toks[0]);
        static const char* const known[] = {"ncols",    "nrows",        "xllcorner",
                                            "yllcorner", "cellsize",    "nodata_value"};
        if (key == "dx" || key == "dy")
            throw ParseError("rectangular cells (dx/dy) are not supported", lineno);
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw ParseError("unknown header key '" + std::string(toks[0]) + "'", lineno);
        if (header.count(key)) throw ParseError("duplicate header key '" + key + "'", lineno);
        double value = 0.0;
        if (!parse_double(toks[1], value) || !std::isfinite(value))
            throw ParseError("non-numeric header value '" + std::string(toks[1]) + "'", lineno);
        header[key] = {value, lineno};
    }

    for (const char* key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
        if (!header.count(key))
            throw ParseError(std::string("missing header key '") + key + "'", lineno);
    }
    auto as_count = [&](const char* key) {
        const auto [v, ln] = header.at(key);
        if (v < 1 || v != std::floor(v) || v > 1e9)
            throw ParseError(std::string(key) + " must be a positive integer", ln);
        return static_cast<Index>(v);
    };

    GridGeoref georef;
    georef.ncols = as_count("ncols");
    georef.nrows = as_count("nrows");
    georef.xll = header.at("xllcorner").first;
    georef.yll = header.at("yllcorner").first;
    georef.cellsize = header.at("cellsize").first;
    if (!(georef.cellsize > 0.0))
        throw ParseError("cellsize must be positive", header.at("cellsize").second);
    const double nodata =
        header.count("nodata_value") ? header.at("nodata_value").first : kDefaultNodata;

    Grid::Values values(georef.nrows, georef.ncols);
    const Index total = georef.size();
    Index filled = 0;
    auto consume = [&](const std::vector<std::string_view>& line_toks) {
        for (auto tok : line_toks) {
            if (filled >= total)
                throw ParseError("too many values, expected " + std::to_string(total), lineno);
            double v = 0.0;
            if (!parse_double(tok, v))
                throw ParseError("non-numeric value '" + std::string(tok) + "'", lineno);
            if (!std::isfinite(v))
                throw ParseError("non-finite value '" + std::string(tok) + "'", lineno);
            values(filled / georef.ncols, filled % georef.ncols) = v;
            ++filled;
        }
    };
    if (have_body_line) consume(toks);
    while (std::getline(in, line)) {
        ++lineno;
        consume(split_ws(line));
    }
    if (filled != total)
        throw ParseError("too few values: got " + std::to_string(filled) + ", expected " +
                             std::to_string(total),
                         lineno);
    return Grid(georef, std::move(values), nodata);
}

Grid read_ascii_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open grid file '" + path.string() + "'");
    try {
        return read_ascii_grid(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

void write_ascii_grid(std::ostream& out, const Grid& g) {
    const auto& geo = g.georef();
    out << "ncols " << geo.ncols << '\n' << "nrows " << geo.nrows << '\n' << "xllcorner ";
    format_double(out, geo.xll);
    out << '\n' << "yllcorner ";
    format_double(out, geo.yll);
    out << '\n' << "cellsize ";
    format_double(out, geo.cellsize);
    out << '\n' << "NODATA_value ";
    format_double(out, g.nodata());
    out << '\n';
    for (Index r = 0; r < g.rows(); ++r) {
        for (Index c = 0; c < g.cols(); ++c) {
            if (c > 0) out << ' ';
            format_double(out, g(r, c));
        }
        out << '\n';
    }
}

void write_ascii_grid(const std::filesystem::path& path, const Grid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write grid file '" + path.string() + "'");
    write_ascii_grid(out, g);
}

std::string to_ascii_grid(const Grid& g) {
    std::ostringstream out;
    write_ascii_grid(out, g);
    return out.str();
}

} // namespace popest

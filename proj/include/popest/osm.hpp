// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace popest::osm {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

enum class ElementKind { node, way };

struct Element {
    std::int64_t id = 0;
    ElementKind kind = ElementKind::node;
    LatLon position;  ///< for ways: mean of the resolved member nodes
    std::map<std::string, std::string> tags;
};

struct ParseResult {
    std::vector<Element> elements;  ///< nodes then ways, each in document order
    std::size_t dropped_ways = 0;   ///< ways none of whose member nodes resolved
};

/// Parses OSM XML. Relations are ignored. A closed way's repeated last node
/// reference is dropped before averaging.
ParseResult parse_osm(std::istream& in);
ParseResult parse_osm(const std::filesystem::path& path);
ParseResult parse_osm_text(const std::string& text);

struct TagRule {
    std::string category;
    std::string key;
    std::string value;
};

/// Rules JSON: array of {category, key, value}.
std::vector<TagRule> parse_rules(std::istream& in);
std::vector<TagRule> parse_rules_text(const std::string& text);

struct AmenityRecord {
    std::string category;
    std::int64_t element_id = 0;
    LatLon position;
    std::optional<std::string> name;
};

/// An element becomes a record of the first rule (in rule order) whose tag
/// matches exactly; elements matching no rule are dropped.
std::vector<AmenityRecord> filter_amenities(const std::vector<Element>& elements,
                                            const std::vector<TagRule>& rules);

inline constexpr double kEarthRadiusM = 6371008.8;

/// Great-circle distance on a sphere of radius kEarthRadiusM.
double haversine_m(const LatLon& a, const LatLon& b) noexcept;

struct RadiusMatch {
    AmenityRecord record;
    double distance_m = 0.0;
};

struct RadiusCount {
    std::map<std::string, std::size_t> counts;  ///< every category seen in the input, possibly 0
    std::vector<RadiusMatch> matches;           ///< input order
};

/// Records with haversine distance <= radius_m from center.
RadiusCount count_within_radius(const std::vector<AmenityRecord>& amenities, const LatLon& center,
                                double radius_m);

/// category,element_id,name,lat,lon,distance_m
void write_amenities_csv(std::ostream& out, const RadiusCount& result);
/// category,count
void write_summary_csv(std::ostream& out, const RadiusCount& result);

} // namespace popest::osm

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/osm.hpp"

#include <expat.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "popest/csv.hpp"
#include "popest/error.hpp"

namespace popest::osm {

namespace {

struct PendingWay {
    std::int64_t id = 0;
    std::vector<std::int64_t> refs;
    std::map<std::string, std::string> tags;
};

class OsmHandler {
public:
    explicit OsmHandler(XML_Parser parser) : parser_(parser) {}

    void start(const char* name, const char** attrs) {
        try {
            on_start(name, attrs);
        } catch (...) {
            error_ = std::current_exception();
            XML_StopParser(parser_, XML_FALSE);
        }
    }

    void end(const char* name) {
        --depth_;
        if (std::strcmp(name, "node") == 0 && in_node_) {
            in_node_ = false;
        } else if (std::strcmp(name, "way") == 0 && in_way_) {
            ways_.push_back(std::move(way_));
            way_ = {};
            in_way_ = false;
        } else if (std::strcmp(name, "relation") == 0) {
            in_relation_ = false;
        }
    }

    std::exception_ptr error() const { return error_; }

    ParseResult finish() {
        if (!saw_root_) throw ParseError("OSM document has no <osm> root element");
        ParseResult result;
        result.elements = std::move(nodes_);
        std::unordered_map<std::int64_t, LatLon> lookup;
        lookup.reserve(result.elements.size());
        for (const auto& n : result.elements) lookup.emplace(n.id, n.position);
        for (auto& w : ways_) {
            auto refs = w.refs;
            if (refs.size() > 1 && refs.front() == refs.back()) refs.pop_back();
            double lat = 0.0, lon = 0.0;
            std::size_t resolved = 0;
            for (auto ref : refs) {
                auto it = lookup.find(ref);
                if (it == lookup.end()) continue;
                lat += it->second.lat;
                lon += it->second.lon;
                ++resolved;
            }
            if (resolved == 0) {
                ++result.dropped_ways;
                continue;
            }
            Element e;
            e.id = w.id;
            e.kind = ElementKind::way;
            e.position = {lat / static_cast<double>(resolved), lon / static_cast<double>(resolved)};
            e.tags = std::move(w.tags);
            result.elements.push_back(std::move(e));
        }
        return result;
    }

private:
    static const char* attr(const char** attrs, const char* key) {
        for (std::size_t i = 0; attrs[i]; i += 2)
            if (std::strcmp(attrs[i], key) == 0) return attrs[i + 1];
        return nullptr;
    }

    std::string where() const {
        return "line " + std::to_string(XML_GetCurrentLineNumber(parser_));
    }

    template <typename T>
    T number(const char* text, const std::string& what) const {
        T v{};
        const char* end = text + std::strlen(text);
        auto [ptr, ec] = std::from_chars(text, end, v);
        if (ec != std::errc() || ptr != end || ptr == text)
            throw ParseError(where() + ": " + what + ": cannot parse '" + text + "'");
        return v;
    }

    void on_start(const char* name, const char** attrs) {
        ++depth_;
        if (depth_ == 1) {
            if (std::strcmp(name, "osm") != 0)
                throw ParseError(std::string("root element must be <osm>, found <") + name + ">");
            saw_root_ = true;
            return;
        }
        if (depth_ == 2) {
            if (std::strcmp(name, "node") == 0) {
                const char* id = attr(attrs, "id");
                if (!id) throw ParseError(where() + ": <node> without id");
                Element e;
                e.id = number<std::int64_t>(id, "node id");
                const std::string label = "node " + std::to_string(e.id);
                const char* lat = attr(attrs, "lat");
                const char* lon = attr(attrs, "lon");
                if (!lat || !lon) throw ParseError(where() + ": " + label + " is missing lat/lon");
                e.position.lat = number<double>(lat, label + " lat");
                e.position.lon = number<double>(lon, label + " lon");
                if (!(std::abs(e.position.lat) <= 90.0) || !(std::abs(e.position.lon) <= 180.0))
                    throw ParseError(where() + ": " + label + " has out-of-range coordinates");
                nodes_.push_back(std::move(e));
                in_node_ = true;
            } else if (std::strcmp(name, "way") == 0) {
                const char* id = attr(attrs, "id");
                if (!id) throw ParseError(where() + ": <way> without id");
                way_ = {};
                way_.id = number<std::int64_t>(id, "way id");
                in_way_ = true;
            } else if (std::strcmp(name, "relation") == 0) {
                in_relation_ = true;
            }
            return;
        }
        if (depth_ == 3 && (in_node_ || in_way_)) {
            const std::string owner = in_node_ ? "node " + std::to_string(nodes_.back().id)
                                               : "way " + std::to_string(way_.id);
            if (std::strcmp(name, "tag") == 0) {
                const char* k = attr(attrs, "k");
                const char* v = attr(attrs, "v");
                if (!k || !v) throw ParseError(where() + ": " + owner + ": <tag> needs k and v");
                auto& tags = in_node_ ? nodes_.back().tags : way_.tags;
                tags[k] = v;
            } else if (std::strcmp(name, "nd") == 0 && in_way_) {
                const char* ref = attr(attrs, "ref");
                if (!ref) throw ParseError(where() + ": " + owner + ": <nd> without ref");
                way_.refs.push_back(number<std::int64_t>(ref, owner + " nd ref"));
            }
        }
    }

    XML_Parser parser_;
    int depth_ = 0;
    bool saw_root_ = false;
    bool in_node_ = false;
    bool in_way_ = false;
    bool in_relation_ = false;
    std::vector<Element> nodes_;
    std::vector<PendingWay> ways_;
    PendingWay way_;
    std::exception_ptr error_;
};

struct ParserHandle {
    XML_Parser parser = XML_ParserCreate(nullptr);
    ~ParserHandle() {
        if (parser) XML_ParserFree(parser);
    }
};

} // namespace

ParseResult parse_osm(std::istream& in) {
    ParserHandle handle;
    if (!handle.parser) throw Error("cannot allocate XML parser");
    OsmHandler handler(handle.parser);
    XML_SetUserData(handle.parser, &handler);
    XML_SetElementHandler(
        handle.parser,
        [](void* ud, const XML_Char* name, const XML_Char** attrs) {
            static_cast<OsmHandler*>(ud)->start(name, attrs);
        },
        [](void* ud, const XML_Char* name) { static_cast<OsmHandler*>(ud)->end(name); });

    char buf[1 << 16];
    bool done = false;
    while (!done) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        done = got < static_cast<std::streamsize>(sizeof(buf));
        if (XML_Parse(handle.parser, buf, static_cast<int>(got), done) == XML_STATUS_ERROR) {
            if (handler.error()) std::rethrow_exception(handler.error());
            throw ParseError(std::string("malformed XML: ") +
                                 XML_ErrorString(XML_GetErrorCode(handle.parser)),
                             XML_GetCurrentLineNumber(handle.parser));
        }
    }
    if (handler.error()) std::rethrow_exception(handler.error());
    return handler.finish();
}

ParseResult parse_osm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open OSM file '" + path.string() + "'");
    return parse_osm(in);
}

ParseResult parse_osm_text(const std::string& text) {
    std::istringstream in(text);
    return parse_osm(in);
}

std::vector<TagRule> parse_rules_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid rules JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("rules JSON must be an array");
    std::vector<TagRule> rules;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& r = doc[i];
        TagRule rule;
        for (auto [field, dest] : {std::pair{"category", &rule.category}, std::pair{"key", &rule.key},
                                   std::pair{"value", &rule.value}}) {
            if (!r.is_object() || !r.contains(field) || !r[field].is_string() ||
                r[field].get<std::string>().empty())
                throw ParseError("rule #" + std::to_string(i) + ": '" + field +
                                 "' must be a non-empty string");
            *dest = r[field].get<std::string>();
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<TagRule> parse_rules(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rules_text(buf.str());
}

std::vector<AmenityRecord> filter_amenities(const std::vector<Element>& elements,
                                            const std::vector<TagRule>& rules) {
    std::vector<AmenityRecord> out;
    for (const auto& e : elements) {
        for (const auto& rule : rules) {
            auto it = e.tags.find(rule.key);
            if (it == e.tags.end() || it->second != rule.value) continue;
            AmenityRecord rec;
            rec.category = rule.category;
            rec.element_id = e.id;
            rec.position = e.position;
            if (auto n = e.tags.find("name"); n != e.tags.end()) rec.name = n->second;
            out.push_back(std::move(rec));
            break;
        }
    }
    return out;
}

double haversine_m(const LatLon& a, const LatLon& b) noexcept {
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = a.lat * deg;
    const double phi2 = b.lat * deg;
    const double dphi = (b.lat - a.lat) * deg;
    const double dlambda = (b.lon - a.lon) * deg;
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = std::min(1.0, s * s + std::cos(phi1) * std::cos(phi2) * t * t);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

RadiusCount count_within_radius(const std::vector<AmenityRecord>& amenities, const LatLon& center,
                                double radius_m) {
    if (!(radius_m >= 0.0)) throw InvalidArgument("radius_m must be >= 0");
    RadiusCount result;
    for (const auto& rec : amenities) {
        auto& count = result.counts[rec.category];
        const double d = haversine_m(center, rec.position);
        if (d <= radius_m) {
            ++count;
            result.matches.push_back({rec, d});
        }
    }
    return result;
}

void write_amenities_csv(std::ostream& out, const RadiusCount& result) {
    out << "category,element_id,name,lat,lon,distance_m\n";
    for (const auto& m : result.matches) {
        out << csv::escape(m.record.category) << ',' << m.record.element_id << ','
            << csv::escape(m.record.name.value_or("")) << ','
            << csv::fixed(m.record.position.lat, 7) << ',' << csv::fixed(m.record.position.lon, 7)
            << ',' << csv::fixed(m.distance_m, 3) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const RadiusCount& result) {
    out << "category,count\n";
    for (const auto& [category, count] : result.counts)
        out << csv::escape(category) << ',' << count << '\n';
}

} // namespace popest::osm

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bron/graph.hpp"

namespace bron {

// Line-delimited interchange format:
//   {"t":"node","id":...,"kind":...,"name":...,"props":{...}}
//   {"t":"edge","src":...,"dst":...,"dir":...,"range":{...}}
// Nodes sorted by id, then edges sorted by (src, dst). "range" only appears
// on edges that carry version bounds.

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::string dump_line(const ojson& j) { return j.dump(-1, ' ', false, ojson::error_handler_t::replace); }

inline ojson range_to_json(const VersionRange& r) {
    ojson j = ojson::object();
    if (r.start) j["start"] = *r.start;
    j["start_inclusive"] = r.start_inclusive;
    if (r.end) j["end"] = *r.end;
    j["end_inclusive"] = r.end_inclusive;
    return j;
}

} // namespace detail

inline nlohmann::ordered_json node_to_json(const ThreatNode& node) {
    detail::ojson j;
    j["t"] = "node";
    j["id"] = node.id;
    j["kind"] = std::string(to_string(node.kind));
    j["name"] = node.name;
    j["props"] = detail::ojson::object();
    for (const auto& [k, v] : node.properties) j["props"][k] = v;
    return j;
}

inline nlohmann::ordered_json edge_to_json(const std::string& src, const std::string& dst, const EdgeAnnotations& ann) {
    detail::ojson j;
    j["t"] = "edge";
    j["src"] = src;
    j["dst"] = dst;
    j["dir"] = std::string(to_string(ann.original_direction));
    if (ann.version_range) j["range"] = detail::range_to_json(*ann.version_range);
    return j;
}

inline void write_interchange(const BronGraph& graph, std::ostream& out) {
    graph.for_each_node([&](const ThreatNode& node) { out << detail::dump_line(node_to_json(node)) << '\n'; });
    graph.for_each_edge([&](const std::string& src, const std::string& dst, const EdgeAnnotations& ann) {
        out << detail::dump_line(edge_to_json(src, dst, ann)) << '\n';
    });
}

inline std::string to_interchange(const BronGraph& graph) {
    std::string out;
    graph.for_each_node([&](const ThreatNode& node) {
        out += detail::dump_line(node_to_json(node));
        out += '\n';
    });
    graph.for_each_edge([&](const std::string& src, const std::string& dst, const EdgeAnnotations& ann) {
        out += detail::dump_line(edge_to_json(src, dst, ann));
        out += '\n';
    });
    return out;
}

/// Reads the interchange format into a sealed graph. Any syntax, schema or
/// graph-rule violation raises ParseError naming the 1-based line.
inline BronGraph read_interchange(std::istream& in) {
    using json = nlohmann::json;
    struct PendingEdge {
        std::size_t line;
        std::string src;
        std::string dst;
        EdgeAnnotations ann;
    };

    BronGraph graph;
    std::vector<PendingEdge> edges;
    std::string text;
    std::size_t line_no = 0;

    const auto fail = [&](std::size_t line, const std::string& what) -> Error {
        return Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
    };
    const auto str_field = [&](const json& j, const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw fail(line_no, std::string("missing string field '") + key + "'");
        return it->get<std::string>();
    };

    while (std::getline(in, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw fail(line_no, std::string("malformed record: ") + e.what());
        }
        if (!j.is_object()) throw fail(line_no, "record is not an object");
        const auto t = str_field(j, "t");
        if (t == "node") {
            ThreatNode node;
            node.id = str_field(j, "id");
            auto kind = parse_node_kind(str_field(j, "kind"));
            if (!kind) throw fail(line_no, "unknown kind '" + j["kind"].get<std::string>() + "'");
            node.kind = *kind;
            node.name = str_field(j, "name");
            if (auto props = j.find("props"); props != j.end()) {
                if (!props->is_object()) throw fail(line_no, "'props' is not an object");
                for (const auto& [k, v] : props->items()) {
                    if (!v.is_string()) throw fail(line_no, "property '" + k + "' is not a string");
                    node.properties[k] = v.get<std::string>();
                }
            }
            try {
                graph.add_node(std::move(node));
            } catch (const Error& e) {
                throw fail(line_no, e.what());
            }
        } else if (t == "edge") {
            PendingEdge edge{line_no, str_field(j, "src"), str_field(j, "dst"), {}};
            if (auto dir = j.find("dir"); dir != j.end()) {
                auto parsed = dir->is_string() ? parse_original_direction(dir->get<std::string>()) : std::nullopt;
                if (!parsed) throw fail(line_no, "bad 'dir'");
                edge.ann.original_direction = *parsed;
            }
            if (auto range = j.find("range"); range != j.end()) {
                if (!range->is_object()) throw fail(line_no, "'range' is not an object");
                VersionRange r;
                if (range->contains("start")) r.start = str_field(*range, "start");
                if (range->contains("end")) r.end = str_field(*range, "end");
                if (auto si = range->find("start_inclusive"); si != range->end()) {
                    if (!si->is_boolean()) throw fail(line_no, "'start_inclusive' is not a boolean");
                    r.start_inclusive = si->get<bool>();
                }
                if (auto ei = range->find("end_inclusive"); ei != range->end()) {
                    if (!ei->is_boolean()) throw fail(line_no, "'end_inclusive' is not a boolean");
                    r.end_inclusive = ei->get<bool>();
                }
                edge.ann.version_range = r;
            }
            edges.push_back(std::move(edge));
        } else {
            throw fail(line_no, "unknown record type '" + t + "'");
        }
    }
    for (auto& e : edges) {
        try {
            graph.add_edge(e.src, e.dst, e.ann);
        } catch (const Error& err) {
            throw fail(e.line, err.what());
        }
    }
    graph.seal();
    return graph;
}

} // namespace bron

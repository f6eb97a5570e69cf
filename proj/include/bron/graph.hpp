#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/error.hpp"
#include "bron/node_kind.hpp"

namespace bron {

using Properties = std::map<std::string, std::string>;

struct ThreatNode {
    std::string id;
    NodeKind kind = NodeKind::Tactic;
    std::string name;
    Properties properties;

    bool operator==(const ThreatNode&) const = default;
};

/// Direction of the link in the source data, relative to the layer order.
enum class OriginalDirection { Downward, Upward, Undirected };

constexpr std::string_view to_string(OriginalDirection d) {
    switch (d) {
        case OriginalDirection::Downward: return "downward";
        case OriginalDirection::Upward: return "upward";
        case OriginalDirection::Undirected: return "undirected";
    }
    return "?";
}

inline std::optional<OriginalDirection> parse_original_direction(std::string_view text) {
    if (text == "downward") return OriginalDirection::Downward;
    if (text == "upward") return OriginalDirection::Upward;
    if (text == "undirected") return OriginalDirection::Undirected;
    return std::nullopt;
}

/// Version bounds carried on a Vulnerability -> Configuration edge
/// (NVD versionStartIncluding / versionEndExcluding and friends).
struct VersionRange {
    std::optional<std::string> start;
    std::optional<std::string> end;
    bool start_inclusive = true;
    bool end_inclusive = false;

    bool operator==(const VersionRange&) const = default;
    auto operator<=>(const VersionRange&) const = default;
};

struct EdgeAnnotations {
    OriginalDirection original_direction = OriginalDirection::Downward;
    std::optional<VersionRange> version_range;

    bool operator==(const EdgeAnnotations&) const = default;
    auto operator<=>(const EdgeAnnotations&) const = default;
};

struct ThreatEdge {
    std::string src;
    std::string dst;
    EdgeAnnotations annotations;

    bool operator==(const ThreatEdge&) const = default;
};

enum class Direction { Up, Down, Both };

/// Year encoded in a CVE id ("CVE-2011-1185" -> 2011).
inline std::optional<int> cve_year(std::string_view id) {
    if (id.size() < 10 || id.substr(0, 4) != "CVE-" || id[8] != '-') return std::nullopt;
    int year = 0;
    for (std::size_t i = 4; i < 8; ++i) {
        if (id[i] < '0' || id[i] > '9') return std::nullopt;
        year = year * 10 + (id[i] - '0');
    }
    for (std::size_t i = 9; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9') return std::nullopt;
    }
    return year;
}

/// Layered threat graph. Nodes and edges are added during the build phase;
/// `seal()` freezes it. Each edge is stored once and indexed in both the
/// down adjacency of its source and the up adjacency of its destination;
/// both lists are kept sorted by neighbor id.
class BronGraph {
public:
    void add_node(ThreatNode node) {
        require_unsealed();
        validate_node(node);
        auto it = nodes_.find(node.id);
        if (it != nodes_.end()) {
            if (it->second.node == node) return;
            throw Error(ErrorCode::DuplicateId, "node '" + node.id + "' already exists with a different payload");
        }
        ++kind_counts_[kind_index(node.kind)];
        auto id = node.id;
        nodes_.emplace(std::move(id), Entry{std::move(node), {}, {}});
    }

    void add_edge(const std::string& src, const std::string& dst, EdgeAnnotations annotations = {}) {
        require_unsealed();
        if (src == dst) throw Error(ErrorCode::SelfEdge, "self edge on '" + src + "'");
        auto s = nodes_.find(src);
        if (s == nodes_.end()) throw Error(ErrorCode::UnknownEndpoint, "edge source '" + src + "' does not exist");
        auto d = nodes_.find(dst);
        if (d == nodes_.end()) throw Error(ErrorCode::UnknownEndpoint, "edge destination '" + dst + "' does not exist");
        const NodeKind sk = s->second.node.kind;
        const NodeKind dk = d->second.node.kind;
        if (!is_allowed_pair(sk, dk)) {
            throw Error(ErrorCode::IllegalLayerPair, std::string(to_string(sk)) + " -> " + std::string(to_string(dk)) +
                                                         " (" + src + " -> " + dst + ")");
        }
        if (annotations.version_range && !(sk == NodeKind::Vulnerability && dk == NodeKind::AffectedProductConfiguration)) {
            throw Error(ErrorCode::IllegalLayerPair, "version ranges are only allowed on Vulnerability -> "
                                                     "AffectedProductConfiguration edges (" + src + " -> " + dst + ")");
        }
        auto key = std::make_pair(src, dst);
        if (auto existing = edges_.find(key); existing != edges_.end()) {
            if (existing->second == annotations) return;
            throw Error(ErrorCode::ConflictingEdge, "edge " + src + " -> " + dst + " already exists with other annotations");
        }
        if (sk == NodeKind::Technique && dk == NodeKind::Technique) check_technique_hierarchy(s->second, d->second);
        insert_sorted(s->second.down, dst);
        insert_sorted(d->second.up, src);
        edges_.emplace(std::move(key), annotations);
    }

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    bool contains(std::string_view id) const { return nodes_.find(id) != nodes_.end(); }

    const ThreatNode* find(std::string_view id) const {
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : &it->second.node;
    }

    const ThreatNode& node(std::string_view id) const { return entry(id).node; }

    std::span<const std::string> down(std::string_view id) const { return entry(id).down; }
    std::span<const std::string> up(std::string_view id) const { return entry(id).up; }

    std::vector<std::string> neighbors(std::string_view id, Direction direction) const {
        const auto& e = entry(id);
        switch (direction) {
            case Direction::Up: return e.up;
            case Direction::Down: return e.down;
            case Direction::Both: break;
        }
        std::vector<std::string> out;
        out.reserve(e.up.size() + e.down.size());
        std::set_union(e.up.begin(), e.up.end(), e.down.begin(), e.down.end(), std::back_inserter(out));
        return out;
    }

    std::size_t degree(std::string_view id) const {
        const auto& e = entry(id);
        return e.up.size() + e.down.size();
    }

    const EdgeAnnotations* find_edge(const std::string& src, const std::string& dst) const {
        auto it = edges_.find(std::make_pair(src, dst));
        return it == edges_.end() ? nullptr : &it->second;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t node_count(NodeKind kind) const { return kind_counts_[kind_index(kind)]; }
    std::size_t edge_count() const { return edges_.size(); }

    /// Calls fn(const ThreatNode&) for every node in id order.
    template <typename Fn>
    void for_each_node(Fn&& fn) const {
        for (const auto& [id, e] : nodes_) fn(e.node);
    }

    template <typename Fn>
    void for_each_node(NodeKind kind, Fn&& fn) const {
        for (const auto& [id, e] : nodes_) {
            if (e.node.kind == kind) fn(e.node);
        }
    }

    std::vector<std::string> node_ids() const {
        std::vector<std::string> out;
        out.reserve(nodes_.size());
        for (const auto& [id, e] : nodes_) out.push_back(id);
        return out;
    }

    std::vector<std::string> node_ids(NodeKind kind) const {
        std::vector<std::string> out;
        out.reserve(node_count(kind));
        for_each_node(kind, [&](const ThreatNode& n) { out.push_back(n.id); });
        return out;
    }

    /// Calls fn(src, dst, annotations) for every edge in (src, dst) order.
    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        for (const auto& [key, ann] : edges_) fn(key.first, key.second, ann);
    }

    bool operator==(const BronGraph& other) const {
        if (nodes_.size() != other.nodes_.size() || edges_ != other.edges_) return false;
        for (const auto& [id, e] : nodes_) {
            const auto* n = other.find(id);
            if (n == nullptr || !(*n == e.node)) return false;
        }
        return true;
    }

private:
    struct Entry {
        ThreatNode node;
        std::vector<std::string> up;
        std::vector<std::string> down;
    };

    void require_unsealed() const {
        if (sealed_) throw Error(ErrorCode::Sealed, "graph is sealed");
    }

    const Entry& entry(std::string_view id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw Error(ErrorCode::UnknownNode, "no node '" + std::string(id) + "'");
        return it->second;
    }

    static void validate_node(const ThreatNode& node) {
        if (node.id.empty()) throw Error(ErrorCode::InvalidNode, "node id must be non-empty");
        if (node.kind == NodeKind::Vulnerability && !cve_year(node.id)) {
            throw Error(ErrorCode::InvalidNode, "vulnerability id '" + node.id + "' does not match CVE-YYYY-N");
        }
        if (node.kind == NodeKind::AffectedProductConfiguration) {
            std::string canonical;
            try {
                canonical = canonical_cpe(node.id);
            } catch (const Error& e) {
                throw Error(ErrorCode::InvalidNode, "configuration id is not a CPE 2.3 name: " + std::string(e.what()));
            }
            if (canonical != node.id) {
                throw Error(ErrorCode::InvalidNode, "configuration id '" + node.id + "' is not canonical (expected '" +
                                                        canonical + "')");
            }
        }
    }

    // Sub-techniques hang directly off one parent: a technique is either a
    // parent or a child, and a child has exactly one parent.
    void check_technique_hierarchy(const Entry& parent, const Entry& child) const {
        auto technique_in = [this](const std::vector<std::string>& ids) {
            return std::any_of(ids.begin(), ids.end(),
                               [this](const std::string& id) { return node(id).kind == NodeKind::Technique; });
        };
        if (technique_in(parent.up)) {
            throw Error(ErrorCode::IllegalLayerPair, "'" + parent.node.id + "' is a sub-technique and cannot have children");
        }
        if (technique_in(child.down)) {
            throw Error(ErrorCode::IllegalLayerPair, "'" + child.node.id + "' already has sub-techniques");
        }
        if (technique_in(child.up)) {
            throw Error(ErrorCode::IllegalLayerPair, "'" + child.node.id + "' already has a parent technique");
        }
    }

    static void insert_sorted(std::vector<std::string>& list, const std::string& id) {
        list.insert(std::lower_bound(list.begin(), list.end(), id), id);
    }

    std::map<std::string, Entry, std::less<>> nodes_;
    std::map<std::pair<std::string, std::string>, EdgeAnnotations> edges_;
    std::array<std::size_t, kNodeKindCount> kind_counts_{};
    bool sealed_ = false;
};

} // namespace bron

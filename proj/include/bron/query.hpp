#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/graph.hpp"
#include "bron/latest.hpp"

namespace bron {

struct YearRange {
    int first = 0;
    int last = 0;

    bool contains(int year) const { return year >= first && year <= last; }
    bool operator==(const YearRange&) const = default;
};

/// Restricts which nodes a query may visit and which paths it may return.
///
/// `years`, `latest_versions_only`, `vendor` and `product` are node
/// predicates: a Vulnerability outside the year range, a superseded
/// configuration, or a configuration of another vendor/product is treated as
/// absent. `kinds_required` is a path predicate: a path counts only if it
/// visits at least one node of every listed kind. The default filter admits
/// everything.
struct QueryFilter {
    std::optional<YearRange> years;
    bool latest_versions_only = false;
    std::optional<std::string> vendor;
    std::optional<std::string> product;
    std::vector<NodeKind> kinds_required;

    bool empty() const {
        return !years && !latest_versions_only && !vendor && !product && kinds_required.empty();
    }
    bool has_node_predicate() const { return years || latest_versions_only || vendor || product; }
};

/// A QueryFilter bound to one graph.
class NodeFilter {
public:
    NodeFilter(const BronGraph& graph, const QueryFilter& filter) : filter_(filter) {
        if (filter_.vendor) filter_.vendor = ascii_lower(*filter_.vendor);
        if (filter_.product) filter_.product = ascii_lower(*filter_.product);
        if (filter.latest_versions_only) superseded_ = partition_versions(graph).superseded;
        for (auto kind : filter.kinds_required) required_mask_ |= kind_bit(kind);
    }

    static unsigned kind_bit(NodeKind kind) { return 1u << kind_index(kind); }

    bool admits(const ThreatNode& node) const {
        if (node.kind == NodeKind::Vulnerability && filter_.years) {
            auto year = cve_year(node.id);
            if (!year || !filter_.years->contains(*year)) return false;
        }
        if (node.kind == NodeKind::AffectedProductConfiguration) {
            if (superseded_.count(node.id) != 0) return false;
            if (filter_.vendor || filter_.product) {
                const auto cpe = parse_cpe23(node.id);
                if (filter_.vendor && !(cpe.vendor().is_value() && cpe.vendor().text() == *filter_.vendor)) return false;
                if (filter_.product && !(cpe.product().is_value() && cpe.product().text() == *filter_.product)) return false;
            }
        }
        return true;
    }

    unsigned required_mask() const { return required_mask_; }
    bool satisfied(unsigned mask) const { return (mask & required_mask_) == required_mask_; }

private:
    QueryFilter filter_;
    std::set<std::string> superseded_;
    unsigned required_mask_ = 0;
};

/// Node ids ordered from the start node to the end node.
struct Path {
    std::vector<std::string> nodes;

    std::size_t size() const { return nodes.size(); }
    bool operator==(const Path&) const = default;
    auto operator<=>(const Path&) const = default;
};

struct PathResult {
    std::vector<Path> paths;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultPathLimit = 10000;

enum class CountMode { DistinctPaths, DistinctEndpointPairs };

namespace detail {

/// Walks layered paths in one direction. A step moves one layer toward the
/// target, or takes the single optional Technique -> Technique hop.
class LayeredWalker {
public:
    LayeredWalker(const BronGraph& graph, const NodeFilter& filter, NodeKind to_kind, Direction direction)
        : graph_(graph), filter_(filter), to_kind_(to_kind), direction_(direction) {}

    std::span<const std::string> step_candidates(const std::string& id) const {
        return direction_ == Direction::Down ? graph_.down(id) : graph_.up(id);
    }

    // Returns the next node if the step is allowed.
    const ThreatNode* admit_step(const ThreatNode& from, const std::string& next_id, bool hop_used) const {
        const ThreatNode& next = graph_.node(next_id);
        if (next.kind == from.kind) {
            if (hop_used) return nullptr;
        } else {
            const int target = layer(to_kind_);
            if (direction_ == Direction::Down ? layer(next.kind) > target : layer(next.kind) < target) return nullptr;
        }
        return filter_.admits(next) ? &next : nullptr;
    }

    NodeKind to_kind() const { return to_kind_; }

private:
    const BronGraph& graph_;
    const NodeFilter& filter_;
    NodeKind to_kind_;
    Direction direction_;
};

inline std::optional<Direction> direction_between(NodeKind from, NodeKind to) {
    if (layer(to) > layer(from)) return Direction::Down;
    if (layer(to) < layer(from)) return Direction::Up;
    return std::nullopt;
}

} // namespace detail

/// Every layered path from `from_id` to a node of `to_kind`, in lexicographic
/// order of node-id sequences, capped at `limit` (truncated is set when more
/// exist). Paths run downward when `to_kind` lies below the start node and
/// upward otherwise; a node of the start's own kind yields no paths.
inline PathResult trace_paths(const BronGraph& graph, const std::string& from_id, NodeKind to_kind,
                              const QueryFilter& filter = {}, std::size_t limit = kDefaultPathLimit) {
    if (limit == 0) throw Error(ErrorCode::LimitZero, "path limit must be positive");
    const ThreatNode& start = graph.node(from_id);
    PathResult result;
    const auto direction = detail::direction_between(start.kind, to_kind);
    const NodeFilter node_filter(graph, filter);
    if (!direction || !node_filter.admits(start)) return result;
    const detail::LayeredWalker walker(graph, node_filter, to_kind, *direction);

    std::vector<std::string> stack{start.id};
    bool done = false;
    std::function<void(const ThreatNode&, bool, unsigned)> visit = [&](const ThreatNode& cur, bool hop_used,
                                                                        unsigned mask) {
        for (const auto& next_id : walker.step_candidates(cur.id)) {
            if (done) return;
            const ThreatNode* next = walker.admit_step(cur, next_id, hop_used);
            if (next == nullptr) continue;
            const bool hop = next->kind == cur.kind;
            const unsigned next_mask = mask | NodeFilter::kind_bit(next->kind);
            stack.push_back(next->id);
            if (next->kind == to_kind && node_filter.satisfied(next_mask)) {
                if (result.paths.size() == limit) {
                    result.truncated = true;
                    done = true;
                    stack.pop_back();
                    return;
                }
                result.paths.push_back(Path{stack});
            }
            visit(*next, hop_used || hop, next_mask);
            stack.pop_back();
        }
    };
    visit(start, false, NodeFilter::kind_bit(start.kind));
    return result;
}

/// Distinct end nodes of kind `to_kind` over all layered paths from `from_id`
/// (sorted ids).
inline std::vector<std::string> reachable_set(const BronGraph& graph, const std::string& from_id, NodeKind to_kind,
                                              const QueryFilter& filter = {}) {
    const ThreatNode& start = graph.node(from_id);
    const auto direction = detail::direction_between(start.kind, to_kind);
    const NodeFilter node_filter(graph, filter);
    if (!direction || !node_filter.admits(start)) return {};
    const detail::LayeredWalker walker(graph, node_filter, to_kind, *direction);

    std::set<std::string> found;
    std::set<std::tuple<std::string, bool, unsigned>> seen;
    std::vector<std::tuple<const ThreatNode*, bool, unsigned>> work{{&start, false, NodeFilter::kind_bit(start.kind)}};
    while (!work.empty()) {
        auto [cur, hop_used, mask] = work.back();
        work.pop_back();
        for (const auto& next_id : walker.step_candidates(cur->id)) {
            const ThreatNode* next = walker.admit_step(*cur, next_id, hop_used);
            if (next == nullptr) continue;
            const bool next_hop = hop_used || next->kind == cur->kind;
            const unsigned next_mask = mask | NodeFilter::kind_bit(next->kind);
            if (next->kind == to_kind && node_filter.satisfied(next_mask)) found.insert(next->id);
            if (seen.emplace(next->id, next_hop, next_mask).second) work.emplace_back(next, next_hop, next_mask);
        }
    }
    return {found.begin(), found.end()};
}

/// Counts layered paths from every node of `from_kind` to nodes of
/// `to_kind`. DistinctPaths counts node sequences; DistinctEndpointPairs
/// counts (start, end) pairs joined by at least one path. Equal kinds give 0.
inline std::uint64_t count_paths(const BronGraph& graph, NodeKind from_kind, NodeKind to_kind,
                                 const QueryFilter& filter = {}, CountMode mode = CountMode::DistinctPaths) {
    const auto direction = detail::direction_between(from_kind, to_kind);
    if (!direction) return 0;
    const NodeFilter node_filter(graph, filter);
    std::uint64_t total = 0;

    if (mode == CountMode::DistinctEndpointPairs) {
        graph.for_each_node(from_kind, [&](const ThreatNode& node) {
            total += reachable_set(graph, node.id, to_kind, filter).size();
        });
        return total;
    }

    // Paths from a state onward (excluding the zero-length one), memoized on
    // (node, hop used, kinds seen so far).
    const detail::LayeredWalker walker(graph, node_filter, to_kind, *direction);
    std::map<std::tuple<std::string, bool, unsigned>, std::uint64_t> memo;
    std::function<std::uint64_t(const ThreatNode&, bool, unsigned)> onward = [&](const ThreatNode& cur, bool hop_used,
                                                                                unsigned mask) -> std::uint64_t {
        auto key = std::make_tuple(cur.id, hop_used, mask);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::uint64_t n = 0;
        for (const auto& next_id : walker.step_candidates(cur.id)) {
            const ThreatNode* next = walker.admit_step(cur, next_id, hop_used);
            if (next == nullptr) continue;
            const unsigned next_mask = mask | NodeFilter::kind_bit(next->kind);
            if (next->kind == to_kind && node_filter.satisfied(next_mask)) ++n;
            n += onward(*next, hop_used || next->kind == cur.kind, next_mask);
        }
        memo.emplace(std::move(key), n);
        return n;
    };
    graph.for_each_node(from_kind, [&](const ThreatNode& node) {
        if (node_filter.admits(node)) total += onward(node, false, NodeFilter::kind_bit(node.kind));
    });
    return total;
}

struct FloaterPartition {
    std::vector<std::string> connected;
    std::vector<std::string> floaters;
};

/// Splits the nodes of `kind` into those with at least one edge and the
/// isolated ones.
inline FloaterPartition partition_floaters(const BronGraph& graph, NodeKind kind) {
    FloaterPartition out;
    graph.for_each_node(kind, [&](const ThreatNode& node) {
        (graph.degree(node.id) == 0 ? out.floaters : out.connected).push_back(node.id);
    });
    return out;
}

} // namespace bron

#pragma once

// Brute-force reference for layered path queries. Deliberately naive: it
// enumerates every simple walk over the undirected edge set (bounded by the
// longest possible layered path) and keeps the ones that satisfy the path
// rules, checked on the whole sequence at the end. It shares nothing with the
// engine beyond the graph's public node/edge listing.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <string>
#include <utility>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/graph.hpp"
#include "bron/latest.hpp"
#include "bron/query.hpp"

namespace oracle {

using bron::BronGraph;
using bron::NodeKind;

struct EdgeSet {
    std::vector<std::string> ids;
    std::unordered_map<std::string, int> index;
    std::vector<NodeKind> kind;
    std::set<std::pair<int, int>> directed; // (src, dst)
    std::vector<std::vector<int>> undirected;

    int layer(int v) const { return bron::layer(kind[static_cast<std::size_t>(v)]); }
    bool has_edge(int src, int dst) const { return directed.count({src, dst}) != 0; }
};

inline EdgeSet edges_of(const BronGraph& g) {
    EdgeSet e;
    g.for_each_node([&](const bron::ThreatNode& n) {
        e.index.emplace(n.id, static_cast<int>(e.ids.size()));
        e.ids.push_back(n.id);
        e.kind.push_back(n.kind);
    });
    e.undirected.resize(e.ids.size());
    g.for_each_edge([&](const std::string& s, const std::string& d, const bron::EdgeAnnotations&) {
        const int a = e.index.at(s);
        const int b = e.index.at(d);
        e.directed.insert({a, b});
        e.undirected[static_cast<std::size_t>(a)].push_back(b);
        e.undirected[static_cast<std::size_t>(b)].push_back(a);
    });
    return e;
}

inline bool node_allowed(const BronGraph& g, const std::string& id, const bron::QueryFilter& f,
                         const std::set<std::string>& superseded) {
    const auto& n = g.node(id);
    if (n.kind == NodeKind::Vulnerability && f.years) {
        const int year = std::stoi(id.substr(4, 4));
        if (year < f.years->first || year > f.years->last) return false;
    }
    if (n.kind == NodeKind::AffectedProductConfiguration) {
        if (f.latest_versions_only && superseded.count(id)) return false;
        if (!f.vendor && !f.product) return true;
        const auto cpe = bron::parse_cpe23(id);
        if (f.vendor && (!cpe.vendor().is_value() || cpe.vendor().text() != bron::ascii_lower(*f.vendor))) return false;
        if (f.product && (!cpe.product().is_value() || cpe.product().text() != bron::ascii_lower(*f.product))) return false;
    }
    return true;
}

/// The path rules, checked on a complete candidate.
inline bool valid_path(const BronGraph& g, const EdgeSet& e, const std::vector<int>& p, NodeKind to,
                       const bron::QueryFilter& f, const std::set<std::string>& superseded) {
    if (p.size() < 2) return false;
    const int from_layer = e.layer(p.front());
    const int to_layer = bron::layer(to);
    if (from_layer == to_layer) return false;
    const bool down = to_layer > from_layer;
    if (e.kind[static_cast<std::size_t>(p.back())] != to) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            if (p[i] == p[j]) return false;
        }
    }
    int hops = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const int a = p[i];
        const int b = p[i + 1];
        // Going down the edge runs a->b, going up it runs b->a.
        if (!(down ? e.has_edge(a, b) : e.has_edge(b, a))) return false;
        const int la = e.layer(a);
        const int lb = e.layer(b);
        if (la == lb) {
            ++hops;
        } else if (down ? lb != la + 1 : lb != la - 1) {
            return false;
        }
        if (down ? lb > to_layer : lb < to_layer) return false;
    }
    if (hops > 1) return false;
    if (!f.empty()) {
        for (int v : p) {
            if (!node_allowed(g, e.ids[static_cast<std::size_t>(v)], f, superseded)) return false;
        }
    }
    for (auto k : f.kinds_required) {
        if (std::none_of(p.begin(), p.end(), [&](int v) { return e.kind[static_cast<std::size_t>(v)] == k; })) return false;
    }
    return true;
}

inline bool valid_path(const BronGraph& g, const EdgeSet& e, const std::vector<std::string>& p, NodeKind to,
                       const bron::QueryFilter& f, const std::set<std::string>& superseded) {
    std::vector<int> indices;
    for (const auto& id : p) {
        auto it = e.index.find(id);
        if (it == e.index.end()) return false;
        indices.push_back(it->second);
    }
    return valid_path(g, e, indices, to, f, superseded);
}

inline void walk(const BronGraph& g, const EdgeSet& e, std::vector<int>& cur, std::vector<char>& on_path,
                 std::vector<std::vector<int>>& out, NodeKind to, const bron::QueryFilter& f,
                 const std::set<std::string>& superseded) {
    if (e.kind[static_cast<std::size_t>(cur.back())] == to && valid_path(g, e, cur, to, f, superseded)) out.push_back(cur);
    // Six layers plus one sibling hop is the longest legal path.
    if (cur.size() >= 7) return;
    const bool down = bron::layer(to) > e.layer(cur.front());
    for (int next : e.undirected[static_cast<std::size_t>(cur.back())]) {
        if (on_path[static_cast<std::size_t>(next)]) continue;
        // Prune walks whose newest step could never appear in a valid path.
        const int next_layer = e.layer(next);
        const int step = next_layer - e.layer(cur.back());
        if (step != 0 && step != (down ? 1 : -1)) continue;
        if (down ? next_layer > bron::layer(to) : next_layer < bron::layer(to)) continue;
        cur.push_back(next);
        on_path[static_cast<std::size_t>(next)] = 1;
        walk(g, e, cur, on_path, out, to, f, superseded);
        on_path[static_cast<std::size_t>(next)] = 0;
        cur.pop_back();
    }
}

/// All valid paths from `from`, sorted lexicographically.
inline std::vector<std::vector<std::string>> all_paths(const BronGraph& g, const EdgeSet& e, const std::string& from,
                                                       NodeKind to, const bron::QueryFilter& f = {}) {
    const auto superseded = f.latest_versions_only ? bron::partition_versions(g).superseded : std::set<std::string>{};
    std::vector<std::vector<int>> found;
    const int start = e.index.at(from);
    std::vector<int> cur{start};
    std::vector<char> on_path(e.ids.size(), 0);
    on_path[static_cast<std::size_t>(start)] = 1;
    walk(g, e, cur, on_path, found, to, f, superseded);
    std::vector<std::vector<std::string>> out;
    out.reserve(found.size());
    for (const auto& p : found) {
        auto& named = out.emplace_back();
        for (int v : p) named.push_back(e.ids[static_cast<std::size_t>(v)]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<std::vector<std::string>> all_paths(const BronGraph& g, const std::string& from, NodeKind to,
                                                       const bron::QueryFilter& f = {}) {
    return all_paths(g, edges_of(g), from, to, f);
}

struct Counts {
    std::uint64_t paths = 0;
    std::uint64_t endpoint_pairs = 0;
};

inline Counts count_both(const BronGraph& g, const EdgeSet& e, NodeKind from, NodeKind to, const bron::QueryFilter& f = {}) {
    Counts n;
    for (const auto& id : g.node_ids(from)) {
        const auto paths = all_paths(g, e, id, to, f);
        std::set<std::string> ends;
        for (const auto& p : paths) ends.insert(p.back());
        n.paths += paths.size();
        n.endpoint_pairs += ends.size();
    }
    return n;
}

inline std::uint64_t count_paths(const BronGraph& g, NodeKind from, NodeKind to, const bron::QueryFilter& f,
                                 bool endpoint_pairs) {
    const auto n = count_both(g, edges_of(g), from, to, f);
    return endpoint_pairs ? n.endpoint_pairs : n.paths;
}

inline std::vector<std::string> reachable(const BronGraph& g, const std::string& from, NodeKind to,
                                          const bron::QueryFilter& f = {}) {
    std::set<std::string> ends;
    for (const auto& p : all_paths(g, from, to, f)) ends.insert(p.back());
    return {ends.begin(), ends.end()};
}

} // namespace oracle

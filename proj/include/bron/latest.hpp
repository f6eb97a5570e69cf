#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/graph.hpp"
#include "bron/version.hpp"

namespace bron {

/// Configuration ids split by the latest-version rule.
struct VersionPartition {
    std::set<std::string> latest;      // maximal version within their (vendor, product)
    std::set<std::string> superseded;  // a newer version of the same product exists
    std::set<std::string> unversioned; // version is ANY/NA, or vendor/product not concrete
};

/// Groups configurations by (vendor, product) and keeps the ones whose
/// version is maximal under compare_versions. Ties (same version, different
/// update/edition/... fields) are all latest. Wildcard versions are never
/// compared: "*" covers every version rather than naming the newest one.
inline VersionPartition partition_versions(const BronGraph& graph) {
    VersionPartition out;
    struct Candidate {
        VersionKey key;
        std::string id;
    };
    std::map<std::pair<std::string, std::string>, std::vector<Candidate>> groups;
    graph.for_each_node(NodeKind::AffectedProductConfiguration, [&](const ThreatNode& node) {
        const auto cpe = parse_cpe23(node.id);
        if (!cpe.vendor().is_value() || !cpe.product().is_value() || !cpe.version().is_value()) {
            out.unversioned.insert(node.id);
            return;
        }
        groups[{cpe.vendor().text(), cpe.product().text()}].push_back({VersionKey(cpe.version().text()), node.id});
    });
    for (auto& [product, candidates] : groups) {
        const VersionKey* best = &candidates.front().key;
        for (const auto& c : candidates) {
            if (c.key > *best) best = &c.key;
        }
        for (const auto& c : candidates) (c.key == *best ? out.latest : out.superseded).insert(c.id);
    }
    return out;
}

} // namespace bron

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/graph.hpp"
#include "bron/records.hpp"

namespace bron {

struct DanglingRef {
    std::string from_id;
    std::string missing_id;

    bool operator==(const DanglingRef&) const = default;
    auto operator<=>(const DanglingRef&) const = default;
};

struct BuildReport {
    std::array<std::size_t, kNodeKindCount> node_counts{};
    std::map<std::pair<NodeKind, NodeKind>, std::size_t> edge_counts;
    std::vector<DanglingRef> dangling_refs;
    // (CVE id, CPE string that failed to parse)
    std::vector<DanglingRef> malformed_refs;
    std::size_t duplicate_records = 0;
    std::size_t duplicate_edges = 0;

    std::size_t node_total() const {
        std::size_t n = 0;
        for (auto c : node_counts) n += c;
        return n;
    }
    std::size_t edge_total() const {
        std::size_t n = 0;
        for (const auto& [pair, c] : edge_counts) n += c;
        return n;
    }
};

struct BuildResult {
    BronGraph graph;
    BuildReport report;
};

/// Display name and properties for a configuration node, from its CPE.
inline ThreatNode configuration_node(const CpeName& cpe) {
    ThreatNode node;
    node.id = serialize(cpe);
    node.kind = NodeKind::AffectedProductConfiguration;
    const auto field = [&](CpeName::Field f) { return format_cpe_attribute(cpe[f]); };
    node.name = field(CpeName::Vendor) + " " + field(CpeName::Product) + " " + field(CpeName::Version);
    node.properties["part"] = field(CpeName::Part);
    node.properties["vendor"] = field(CpeName::Vendor);
    node.properties["product"] = field(CpeName::Product);
    node.properties["version"] = field(CpeName::Version);
    return node;
}

namespace detail {

inline ThreatNode to_node(const SourceRecord& record) {
    return std::visit(
        [](const auto& rec) -> ThreatNode {
            using T = std::decay_t<decltype(rec)>;
            if constexpr (std::is_same_v<T, TacticRec>) {
                return {rec.id, NodeKind::Tactic, rec.name, rec.properties};
            } else if constexpr (std::is_same_v<T, TechniqueRec>) {
                return {rec.id, NodeKind::Technique, rec.name, rec.properties};
            } else if constexpr (std::is_same_v<T, PatternRec>) {
                return {rec.id, NodeKind::AttackPattern, rec.name, rec.properties};
            } else if constexpr (std::is_same_v<T, WeaknessRec>) {
                return {rec.id, NodeKind::Weakness, rec.name, rec.properties};
            } else {
                ThreatNode node{rec.id, NodeKind::Vulnerability, rec.id, {}};
                if (!rec.description.empty()) node.properties["description"] = rec.description;
                if (rec.cvss_score) {
                    node.properties["cvss_score"] = rec.cvss_score->to_string();
                    node.properties["cvss_version"] = rec.cvss_version;
                }
                if (auto year = cve_year(rec.id)) node.properties["year"] = std::to_string(*year);
                return node;
            }
        },
        record);
}

inline const std::string& record_id(const SourceRecord& record) {
    return std::visit([](const auto& rec) -> const std::string& { return rec.id; }, record);
}

} // namespace detail

/// Stitches loaded records into a sealed graph.
///
/// Configuration nodes come only from CVE matches. An edge is created only
/// when both endpoints exist; otherwise the reference is listed in
/// `dangling_refs`. Records sharing an id must be identical
/// (ConflictingRecord otherwise). When the same (src, dst) edge is produced
/// more than once with different annotations, the smallest annotation wins,
/// so the result does not depend on input order.
inline BuildResult build_graph(std::span<const SourceRecord> records) {
    BuildResult result;
    auto& report = result.report;

    std::map<std::string, const SourceRecord*> by_id;
    for (const auto& record : records) {
        const auto& id = detail::record_id(record);
        auto [it, inserted] = by_id.emplace(id, &record);
        if (inserted) continue;
        if (*it->second == record) {
            ++report.duplicate_records;
            continue;
        }
        throw Error(ErrorCode::ConflictingRecord, "two different records share id '" + id + "'");
    }

    BronGraph& graph = result.graph;
    std::vector<ThreatEdge> edges;
    const auto edge = [&](std::string src, std::string dst, OriginalDirection dir,
                          std::optional<VersionRange> range = std::nullopt) {
        edges.push_back(ThreatEdge{std::move(src), std::move(dst), EdgeAnnotations{dir, std::move(range)}});
    };

    for (const auto& [id, record] : by_id) {
        graph.add_node(detail::to_node(*record));
        if (const auto* tech = std::get_if<TechniqueRec>(record)) {
            for (const auto& tactic : tech->tactic_ids) edge(tactic, tech->id, OriginalDirection::Upward);
            if (tech->parent_id) edge(*tech->parent_id, tech->id, OriginalDirection::Upward);
            for (const auto& capec : tech->capec_ids) edge(tech->id, capec, OriginalDirection::Downward);
        } else if (const auto* pattern = std::get_if<PatternRec>(record)) {
            for (const auto& cwe : pattern->cwe_ids) edge(pattern->id, cwe, OriginalDirection::Downward);
        } else if (const auto* vuln = std::get_if<VulnRec>(record)) {
            for (const auto& cwe : vuln->cwe_ids) edge(cwe, vuln->id, OriginalDirection::Upward);
            for (const auto& rejected : vuln->rejected_cpes) report.malformed_refs.push_back({vuln->id, rejected});
        }
    }

    // Configuration nodes are added after every record node so that a CPE id
    // can never shadow a record.
    for (const auto& [id, record] : by_id) {
        const auto* vuln = std::get_if<VulnRec>(record);
        if (vuln == nullptr) continue;
        for (const auto& match : vuln->cpe_matches) {
            CpeName cpe;
            try {
                cpe = parse_cpe23(match.cpe);
            } catch (const Error&) {
                report.malformed_refs.push_back({vuln->id, match.cpe});
                continue;
            }
            auto node = configuration_node(cpe);
            const auto cpe_id = node.id;
            if (!graph.contains(cpe_id)) graph.add_node(std::move(node));
            edge(vuln->id, cpe_id, OriginalDirection::Downward, match.version_range);
        }
    }

    std::sort(edges.begin(), edges.end(), [](const ThreatEdge& a, const ThreatEdge& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.dst != b.dst) return a.dst < b.dst;
        return a.annotations < b.annotations;
    });
    const ThreatEdge* previous = nullptr;
    for (const auto& e : edges) {
        if (previous != nullptr && previous->src == e.src && previous->dst == e.dst) {
            ++report.duplicate_edges;
            continue;
        }
        previous = &e;
        // Record the reference from the side that cited it. A cited id that
        // exists but sits in the wrong layer is just as unusable as a missing one.
        const bool cited_by_dst = e.annotations.original_direction == OriginalDirection::Upward;
        const auto& citing = cited_by_dst ? e.dst : e.src;
        const auto& cited = cited_by_dst ? e.src : e.dst;
        const auto* src_node = graph.find(e.src);
        const auto* dst_node = graph.find(e.dst);
        if (src_node == nullptr || dst_node == nullptr || !is_allowed_pair(src_node->kind, dst_node->kind)) {
            report.dangling_refs.push_back({citing, cited});
            continue;
        }
        graph.add_edge(e.src, e.dst, e.annotations);
    }

    std::sort(report.dangling_refs.begin(), report.dangling_refs.end());
    report.dangling_refs.erase(std::unique(report.dangling_refs.begin(), report.dangling_refs.end()),
                               report.dangling_refs.end());
    std::sort(report.malformed_refs.begin(), report.malformed_refs.end());
    report.malformed_refs.erase(std::unique(report.malformed_refs.begin(), report.malformed_refs.end()),
                                report.malformed_refs.end());

    graph.seal();
    for (auto kind : kAllKinds) report.node_counts[kind_index(kind)] = graph.node_count(kind);
    graph.for_each_edge([&](const std::string& src, const std::string& dst, const EdgeAnnotations&) {
        ++report.edge_counts[{graph.node(src).kind, graph.node(dst).kind}];
    });
    return result;
}

inline BuildResult build_graph(std::initializer_list<std::span<const SourceRecord>> groups) {
    std::vector<SourceRecord> all;
    for (auto group : groups) all.insert(all.end(), group.begin(), group.end());
    return build_graph(std::span<const SourceRecord>(all));
}

} // namespace bron

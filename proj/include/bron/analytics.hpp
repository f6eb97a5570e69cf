#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/graph.hpp"
#include "bron/latest.hpp"
#include "bron/query.hpp"
#include "bron/score.hpp"
#include "bron/version.hpp"

namespace bron {

/// Copy of `graph` restricted to nodes accepted by `keep`, with every edge
/// whose endpoints both survive. The result is sealed.
template <typename Pred>
BronGraph induced_subgraph(const BronGraph& graph, Pred&& keep) {
    BronGraph out;
    graph.for_each_node([&](const ThreatNode& node) {
        if (keep(node)) out.add_node(node);
    });
    graph.for_each_edge([&](const std::string& src, const std::string& dst, const EdgeAnnotations& ann) {
        if (out.contains(src) && out.contains(dst)) out.add_edge(src, dst, ann);
    });
    out.seal();
    return out;
}

/// The graph as seen through the node predicates of `filter` (years,
/// latest-only, vendor/product). `kinds_required` only constrains paths and
/// is ignored here.
inline BronGraph filtered_view(const BronGraph& graph, const QueryFilter& filter) {
    const NodeFilter node_filter(graph, filter);
    return induced_subgraph(graph, [&](const ThreatNode& node) { return node_filter.admits(node); });
}

struct LatestVersionView {
    BronGraph graph;
    std::vector<std::string> unversioned; // kept, but never compared
};

inline LatestVersionView latest_version_view(const BronGraph& graph) {
    const auto partition = partition_versions(graph);
    LatestVersionView view;
    view.graph = induced_subgraph(graph, [&](const ThreatNode& node) { return partition.superseded.count(node.id) == 0; });
    view.unversioned.assign(partition.unversioned.begin(), partition.unversioned.end());
    return view;
}

namespace detail {

// Reports work on a view only when the filter actually removes something.
class ReportGraph {
public:
    ReportGraph(const BronGraph& graph, const QueryFilter& filter) {
        if (filter.has_node_predicate()) {
            owned_ = filtered_view(graph, filter);
            graph_ = &*owned_;
        } else {
            graph_ = &graph;
        }
    }
    const BronGraph& operator*() const { return *graph_; }
    const BronGraph* operator->() const { return graph_; }

private:
    std::optional<BronGraph> owned_;
    const BronGraph* graph_;
};

inline double median_of_sorted(const std::vector<std::size_t>& values) {
    if (values.empty()) return 0.0;
    const auto n = values.size();
    if (n % 2 == 1) return static_cast<double>(values[n / 2]);
    return (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2])) / 2.0;
}

inline std::optional<Score> node_score(const ThreatNode& node) {
    auto it = node.properties.find("cvss_score");
    if (it == node.properties.end()) return std::nullopt;
    return Score::parse(it->second);
}

inline bool has_configuration(const BronGraph& graph, const std::string& cve) {
    for (const auto& id : graph.down(cve)) {
        if (graph.node(id).kind == NodeKind::AffectedProductConfiguration) return true;
    }
    return false;
}

struct ConfigurationRef {
    std::string id;
    std::string vendor;
    std::string product;
    std::string version; // formatted attribute, "*" or "-" when not a value
};

inline std::vector<ConfigurationRef> configurations_of_vendor(const BronGraph& graph, std::string_view vendor_name) {
    const auto vendor = ascii_lower(vendor_name);
    std::vector<ConfigurationRef> out;
    graph.for_each_node(NodeKind::AffectedProductConfiguration, [&](const ThreatNode& node) {
        const auto cpe = parse_cpe23(node.id);
        if (!cpe.vendor().is_value() || cpe.vendor().text() != vendor || !cpe.product().is_value()) return;
        out.push_back({node.id, vendor, cpe.product().text(), format_cpe_attribute(cpe.version())});
    });
    return out;
}

} // namespace detail

// ---------------------------------------------------------------- inventory

struct InventoryRow {
    NodeKind kind{};
    std::size_t total_entries = 0; // non-floaters
    double median_links = 0.0;
    std::size_t min_links = 0;
    std::size_t max_links = 0;
    std::size_t range = 0;
    std::size_t floater_count = 0;

    bool operator==(const InventoryRow&) const = default;
};

/// One row per kind in layer order. Link statistics use total degree over
/// non-floaters only.
inline std::vector<InventoryRow> inventory_report(const BronGraph& graph, const QueryFilter& filter = {}) {
    const detail::ReportGraph g(graph, filter);
    std::vector<InventoryRow> rows;
    for (auto kind : kAllKinds) {
        InventoryRow row;
        row.kind = kind;
        std::vector<std::size_t> degrees;
        g->for_each_node(kind, [&](const ThreatNode& node) {
            const auto d = g->degree(node.id);
            if (d == 0) {
                ++row.floater_count;
            } else {
                degrees.push_back(d);
            }
        });
        std::sort(degrees.begin(), degrees.end());
        row.total_entries = degrees.size();
        if (!degrees.empty()) {
            row.min_links = degrees.front();
            row.max_links = degrees.back();
            row.range = row.max_links - row.min_links;
            row.median_links = detail::median_of_sorted(degrees);
        }
        rows.push_back(row);
    }
    return rows;
}

inline constexpr double kDefaultSuperEntryPercentile = 99.0;

/// Nodes of `kind` whose degree reaches the nearest-rank `percentile` of the
/// kind's non-floater degree distribution. Sorted by id.
inline std::vector<std::string> super_entries(const BronGraph& graph, NodeKind kind,
                                              double percentile = kDefaultSuperEntryPercentile) {
    if (!(percentile > 0.0 && percentile <= 100.0)) {
        throw Error(ErrorCode::InvalidArgument, "percentile must be in (0, 100]");
    }
    std::vector<std::pair<std::size_t, std::string>> entries;
    graph.for_each_node(kind, [&](const ThreatNode& node) {
        if (auto d = graph.degree(node.id); d > 0) entries.emplace_back(d, node.id);
    });
    if (entries.empty()) {
        throw Error(ErrorCode::NoEntries, "no linked " + std::string(to_string(kind)) + " entries");
    }
    std::vector<std::size_t> degrees;
    for (const auto& e : entries) degrees.push_back(e.first);
    std::sort(degrees.begin(), degrees.end());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(degrees.size())));
    rank = std::clamp<std::size_t>(rank, 1, degrees.size());
    const auto threshold = degrees[rank - 1];
    std::vector<std::string> out;
    for (const auto& [d, id] : entries) {
        if (d >= threshold) out.push_back(id);
    }
    return out;
}

// ------------------------------------------------------------------- trends

struct YearConnectivity {
    std::size_t cve_count = 0;
    std::size_t with_tactic_path = 0;
    std::size_t with_pattern_path = 0;
    std::size_t without_weakness = 0;
    double pct_with_tactic_path = 0.0;
    double pct_with_pattern_path = 0.0;
    double pct_without_weakness = 0.0;
    // Layered paths ending at this year's CVEs.
    std::uint64_t paths_from_tactic = 0;
    std::uint64_t paths_from_pattern = 0;
    std::uint64_t paths_from_weakness = 0;

    bool operator==(const YearConnectivity&) const = default;
};

/// Per CVE-id year: how many CVEs have an upward path to a tactic, to an
/// attack pattern, or no weakness at all, plus path counts into the year.
inline std::map<int, YearConnectivity> yearly_connectivity(const BronGraph& graph, const QueryFilter& filter = {},
                                                           CountMode mode = CountMode::DistinctPaths) {
    const detail::ReportGraph g(graph, filter);
    std::map<int, YearConnectivity> out;
    g->for_each_node(NodeKind::Vulnerability, [&](const ThreatNode& node) {
        auto year = cve_year(node.id);
        if (!year) return;
        auto& row = out[*year];
        ++row.cve_count;
        if (!reachable_set(*g, node.id, NodeKind::Tactic).empty()) ++row.with_tactic_path;
        if (!reachable_set(*g, node.id, NodeKind::AttackPattern).empty()) ++row.with_pattern_path;
        if (reachable_set(*g, node.id, NodeKind::Weakness).empty()) ++row.without_weakness;
    });
    for (auto& [year, row] : out) {
        const auto pct = [&](std::size_t n) { return 100.0 * static_cast<double>(n) / static_cast<double>(row.cve_count); };
        row.pct_with_tactic_path = pct(row.with_tactic_path);
        row.pct_with_pattern_path = pct(row.with_pattern_path);
        row.pct_without_weakness = pct(row.without_weakness);
        QueryFilter one_year;
        one_year.years = YearRange{year, year};
        row.paths_from_tactic = count_paths(*g, NodeKind::Tactic, NodeKind::Vulnerability, one_year, mode);
        row.paths_from_pattern = count_paths(*g, NodeKind::AttackPattern, NodeKind::Vulnerability, one_year, mode);
        row.paths_from_weakness = count_paths(*g, NodeKind::Weakness, NodeKind::Vulnerability, one_year, mode);
    }
    return out;
}

// ----------------------------------------------------------------- severity

struct YearSeverity {
    Score unlinked_sum;
    Score operational_sum;
    Score total_sum;
    std::size_t unlinked_count = 0;
    std::size_t operational_count = 0;
    std::size_t zero_score_unlinked = 0; // unlinked CVEs contributing 0 (score 0.0 or missing)
    std::size_t missing_score_count = 0;
    double zero_score_unlinked_fraction = 0.0;

    bool operator==(const YearSeverity&) const = default;
};

struct SeverityLedger {
    std::map<int, YearSeverity> years;
    YearSeverity all_years;
};

/// Splits CVE severity into unlinked (no configuration edge) and operational
/// (at least one), per CVE-id year. Missing scores add 0 and are counted.
inline SeverityLedger severity_ledger(const BronGraph& graph, const QueryFilter& filter = {}) {
    const detail::ReportGraph g(graph, filter);
    SeverityLedger ledger;
    const auto add = [](YearSeverity& row, bool linked, std::optional<Score> score) {
        const Score s = score.value_or(Score{});
        if (!score) ++row.missing_score_count;
        if (linked) {
            ++row.operational_count;
            row.operational_sum += s;
        } else {
            ++row.unlinked_count;
            row.unlinked_sum += s;
            if (s.tenths() == 0) ++row.zero_score_unlinked;
        }
        row.total_sum += s;
    };
    g->for_each_node(NodeKind::Vulnerability, [&](const ThreatNode& node) {
        auto year = cve_year(node.id);
        if (!year) return;
        const bool linked = detail::has_configuration(*g, node.id);
        const auto score = detail::node_score(node);
        add(ledger.years[*year], linked, score);
        add(ledger.all_years, linked, score);
    });
    const auto finish = [](YearSeverity& row) {
        if (row.unlinked_count > 0) {
            row.zero_score_unlinked_fraction =
                static_cast<double>(row.zero_score_unlinked) / static_cast<double>(row.unlinked_count);
        }
    };
    for (auto& [year, row] : ledger.years) finish(row);
    finish(ledger.all_years);
    return ledger;
}

// ---------------------------------------------------------- vendor studies

enum class MatrixMode { UniqueProducts, ProductVersions };

struct VendorTacticCell {
    std::string vendor;
    std::string tactic_id;
    std::size_t count = 0;

    bool operator==(const VendorTacticCell&) const = default;
};

/// For each vendor and each tactic in the graph, the number of distinct
/// products (or distinct product versions) with a path up to the tactic.
/// Vendors absent from the graph get a row of zeros.
inline std::vector<VendorTacticCell> vendor_tactic_matrix(const BronGraph& graph, const std::vector<std::string>& vendors,
                                                          MatrixMode mode = MatrixMode::UniqueProducts,
                                                          const QueryFilter& filter = {}) {
    if (vendors.empty()) throw Error(ErrorCode::InvalidArgument, "vendor list is empty");
    const detail::ReportGraph g(graph, filter);
    const auto tactics = g->node_ids(NodeKind::Tactic);
    std::vector<VendorTacticCell> cells;
    for (const auto& vendor : vendors) {
        std::map<std::string, std::set<std::pair<std::string, std::string>>> hits;
        for (const auto& config : detail::configurations_of_vendor(*g, vendor)) {
            const auto key = mode == MatrixMode::UniqueProducts ? std::make_pair(config.product, std::string())
                                                                : std::make_pair(config.product, config.version);
            for (const auto& tactic : reachable_set(*g, config.id, NodeKind::Tactic)) hits[tactic].insert(key);
        }
        for (const auto& tactic : tactics) {
            auto it = hits.find(tactic);
            cells.push_back({vendor, tactic, it == hits.end() ? 0 : it->second.size()});
        }
    }
    return cells;
}

enum class SeverityScoring { MaxPerProduct, AllScores };

/// vendor -> severity scores of its products. MaxPerProduct gives one score
/// per product (the maximum over linked CVEs); AllScores gives every linked
/// CVE score. Products are visited in name order, CVEs in id order.
/// `tactic_id` restricts to products with a path to that tactic.
inline std::map<std::string, std::vector<Score>> vendor_severity_distribution(
    const BronGraph& graph, const std::vector<std::string>& vendors, SeverityScoring scoring = SeverityScoring::MaxPerProduct,
    const std::optional<std::string>& tactic_id = std::nullopt, const QueryFilter& filter = {}) {
    const detail::ReportGraph g(graph, filter);
    std::optional<std::set<std::string>> allowed_configs;
    if (tactic_id) {
        if (g->node(*tactic_id).kind != NodeKind::Tactic) {
            throw Error(ErrorCode::WrongKind, "'" + *tactic_id + "' is not a Tactic");
        }
        const auto reach = reachable_set(*g, *tactic_id, NodeKind::AffectedProductConfiguration);
        allowed_configs.emplace(reach.begin(), reach.end());
    }
    std::map<std::string, std::vector<Score>> out;
    for (const auto& vendor : vendors) {
        std::map<std::string, std::set<std::string>> product_configs;
        for (const auto& config : detail::configurations_of_vendor(*g, vendor)) {
            product_configs[config.product].insert(config.id);
        }
        auto& scores = out[vendor];
        for (const auto& [product, configs] : product_configs) {
            if (allowed_configs &&
                std::none_of(configs.begin(), configs.end(), [&](const auto& c) { return allowed_configs->count(c) != 0; })) {
                continue;
            }
            std::set<std::string> cves;
            for (const auto& config : configs) {
                for (const auto& cve : g->up(config)) cves.insert(cve);
            }
            std::vector<Score> product_scores;
            for (const auto& cve : cves) {
                if (auto s = detail::node_score(g->node(cve))) product_scores.push_back(*s);
            }
            if (product_scores.empty()) continue;
            if (scoring == SeverityScoring::MaxPerProduct) {
                scores.push_back(*std::max_element(product_scores.begin(), product_scores.end()));
            } else {
                scores.insert(scores.end(), product_scores.begin(), product_scores.end());
            }
        }
    }
    return out;
}

inline constexpr std::array<NodeKind, 5> kThreatKinds = {NodeKind::Tactic, NodeKind::Technique, NodeKind::AttackPattern,
                                                         NodeKind::Weakness, NodeKind::Vulnerability};

struct ProductVersionRow {
    std::string configuration_id;
    std::string version;
    std::array<std::size_t, kThreatKinds.size()> counts{}; // in kThreatKinds order

    bool operator==(const ProductVersionRow&) const = default;
};

/// One row per configuration of vendor/product, ordered by version, with
/// the number of distinct reachable entries of each upper kind.
inline std::vector<ProductVersionRow> product_version_report(const BronGraph& graph, const std::string& vendor,
                                                             const std::string& product, const QueryFilter& filter = {}) {
    const detail::ReportGraph g(graph, filter);
    std::vector<std::pair<VersionKey, ProductVersionRow>> rows;
    for (const auto& config : detail::configurations_of_vendor(*g, vendor)) {
        if (config.product != ascii_lower(product)) continue;
        ProductVersionRow row;
        row.configuration_id = config.id;
        row.version = config.version;
        for (std::size_t i = 0; i < kThreatKinds.size(); ++i) {
            row.counts[i] = reachable_set(*g, config.id, kThreatKinds[i]).size();
        }
        rows.emplace_back(VersionKey(config.version), std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (auto c = a.first <=> b.first; c != 0) return c < 0;
        return a.second.configuration_id < b.second.configuration_id;
    });
    std::vector<ProductVersionRow> out;
    for (auto& [key, row] : rows) out.push_back(std::move(row));
    return out;
}

// ---------------------------------------------------------- canned queries

namespace detail {

inline void require_kind(const BronGraph& graph, const std::string& id, NodeKind kind) {
    if (graph.node(id).kind != kind) {
        throw Error(ErrorCode::WrongKind, "'" + id + "' is not a " + std::string(to_string(kind)));
    }
}

} // namespace detail

inline std::vector<std::string> configs_for_tactic(const BronGraph& graph, const std::string& tactic_id,
                                                   const QueryFilter& filter = {}) {
    detail::require_kind(graph, tactic_id, NodeKind::Tactic);
    return reachable_set(graph, tactic_id, NodeKind::AffectedProductConfiguration, filter);
}

inline std::vector<std::string> techniques_for_vulnerability(const BronGraph& graph, const std::string& cve_id,
                                                             const QueryFilter& filter = {}) {
    detail::require_kind(graph, cve_id, NodeKind::Vulnerability);
    return reachable_set(graph, cve_id, NodeKind::Technique, filter);
}

struct TacticsAndPatterns {
    std::vector<std::string> tactics;
    std::vector<std::string> patterns;

    bool operator==(const TacticsAndPatterns&) const = default;
};

/// Tactics and attack patterns reachable from any configuration of the
/// product (or only the given version). UnknownProduct if none matches.
inline TacticsAndPatterns tactics_and_patterns_for_product(const BronGraph& graph, const std::string& vendor,
                                                           const std::string& product,
                                                           const std::optional<std::string>& version = std::nullopt,
                                                           const QueryFilter& filter = {}) {
    std::set<std::string> tactics;
    std::set<std::string> patterns;
    bool matched = false;
    for (const auto& config : detail::configurations_of_vendor(graph, vendor)) {
        if (config.product != ascii_lower(product)) continue;
        if (version && config.version != format_cpe_attribute(CpeAttribute::value(*version))) continue;
        matched = true;
        for (auto& id : reachable_set(graph, config.id, NodeKind::Tactic, filter)) tactics.insert(std::move(id));
        for (auto& id : reachable_set(graph, config.id, NodeKind::AttackPattern, filter)) patterns.insert(std::move(id));
    }
    if (!matched) {
        throw Error(ErrorCode::UnknownProduct,
                    "no configuration for " + vendor + " " + product + (version ? " " + *version : std::string()));
    }
    return {{tactics.begin(), tactics.end()}, {patterns.begin(), patterns.end()}};
}

} // namespace bron

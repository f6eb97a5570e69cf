#include <gtest/gtest.h>

#include <set>

#include "bron/analytics.hpp"
#include "support/fixtures.hpp"
#include "support/random_graph.hpp"

using namespace bron;

namespace {

const InventoryRow& row_of(const std::vector<InventoryRow>& rows, NodeKind kind) {
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.kind == kind; });
}

ErrorCode error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::InvalidArgument;
}

bool linked(const BronGraph& g, const std::string& cve) {
    const auto down = g.down(cve);
    return std::any_of(down.begin(), down.end(), [&](const std::string& id) {
        return g.node(id).kind == NodeKind::AffectedProductConfiguration;
    });
}

std::vector<std::string> vendors_of(const BronGraph& g) {
    std::set<std::string> out;
    for (const auto& id : g.node_ids(NodeKind::AffectedProductConfiguration)) out.insert(parse_cpe23(id).vendor().text());
    out.insert("nobody");
    return {out.begin(), out.end()};
}

} // namespace

TEST(Inventory, MiniRows) {
    const auto rows = inventory_report(fixtures::mini());
    ASSERT_EQ(rows.size(), kNodeKindCount);
    const auto& t = row_of(rows, NodeKind::Technique);
    EXPECT_EQ(t.total_entries, 2u);
    EXPECT_DOUBLE_EQ(t.median_links, 2.5);
    EXPECT_EQ(t.min_links, 2u);
    EXPECT_EQ(t.max_links, 3u);
    EXPECT_EQ(t.range, 1u);
    EXPECT_EQ(t.floater_count, 1u);
    EXPECT_EQ(row_of(rows, NodeKind::Vulnerability).floater_count, 1u);
    EXPECT_DOUBLE_EQ(row_of(rows, NodeKind::Vulnerability).median_links, 4.0);
    EXPECT_EQ(row_of(rows, NodeKind::AttackPattern).floater_count, 1u);
    EXPECT_EQ(row_of(rows, NodeKind::AffectedProductConfiguration).floater_count, 0u);
}

TEST(Inventory, EmptyGraphGivesZeroRows) {
    BronGraph g;
    g.seal();
    const auto rows = inventory_report(g);
    ASSERT_EQ(rows.size(), kNodeKindCount);
    for (const auto& r : rows) {
        EXPECT_EQ(r.total_entries, 0u);
        EXPECT_EQ(r.floater_count, 0u);
        EXPECT_DOUBLE_EQ(r.median_links, 0.0);
    }
}

TEST(SuperEntries, Examples) {
    const auto& g = fixtures::mini();
    EXPECT_EQ(super_entries(g, NodeKind::Vulnerability, 50), std::vector<std::string>{"CVE-2011-1185"});
    EXPECT_EQ(super_entries(g, NodeKind::Technique), std::vector<std::string>{"T1574"});
    EXPECT_EQ(super_entries(g, NodeKind::Technique, 50), (std::vector<std::string>{"T1574", "T1574.010"}));
    EXPECT_EQ(error_of([&] { super_entries(g, NodeKind::Tactic, 0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([&] { super_entries(g, NodeKind::Tactic, 100.5); }), ErrorCode::InvalidArgument);
    BronGraph empty;
    empty.seal();
    EXPECT_EQ(error_of([&] { super_entries(empty, NodeKind::Tactic); }), ErrorCode::NoEntries);
}

TEST(LatestView, KeepsNewestChromeOnly) {
    const auto view = latest_version_view(fixtures::mini());
    EXPECT_EQ(view.graph.node_ids(NodeKind::AffectedProductConfiguration), std::vector<std::string>{fixtures::kChrome126});
    EXPECT_EQ(view.graph.node_count(), 12u);
    EXPECT_EQ(view.graph.edge_count(), 9u);
    EXPECT_EQ(view.graph.degree("CVE-2011-1185"), 3u);
    EXPECT_TRUE(view.unversioned.empty());
}

TEST(LatestView, SingleVersionGraphIsIdentity) {
    const auto records = fixtures::mini_records();
    std::vector<SourceRecord> trimmed;
    for (auto r : records) {
        if (auto* v = std::get_if<VulnRec>(&r); v && !v->cpe_matches.empty()) v->cpe_matches.resize(1);
        trimmed.push_back(r);
    }
    const auto g = build_graph(std::span<const SourceRecord>(trimmed)).graph;
    EXPECT_TRUE(latest_version_view(g).graph == g);
}

TEST(LatestView, WildcardVersionsAreKeptAndFlagged) {
    std::vector<SourceRecord> records = {
        VulnRec{"CVE-2020-0001", "", std::nullopt, "", {}, {{"cpe:2.3:a:acme:tool:*:*:*:*:*:*:*:*", std::nullopt},
                                                           {"cpe:2.3:a:acme:tool:1.0:*:*:*:*:*:*:*", std::nullopt},
                                                           {"cpe:2.3:a:acme:tool:2.0:*:*:*:*:*:*:*", std::nullopt}}, {}}};
    const auto g = build_graph(std::span<const SourceRecord>(records)).graph;
    const auto view = latest_version_view(g);
    EXPECT_EQ(view.graph.node_ids(NodeKind::AffectedProductConfiguration),
              (std::vector<std::string>{"cpe:2.3:a:acme:tool:*:*:*:*:*:*:*:*", "cpe:2.3:a:acme:tool:2.0:*:*:*:*:*:*:*"}));
    EXPECT_EQ(view.unversioned, std::vector<std::string>{"cpe:2.3:a:acme:tool:*:*:*:*:*:*:*:*"});
}

TEST(Trends, MiniYears) {
    const auto years = yearly_connectivity(fixtures::mini());
    ASSERT_EQ(years.size(), 2u);
    const auto& y1999 = years.at(1999);
    EXPECT_EQ(y1999.cve_count, 1u);
    EXPECT_DOUBLE_EQ(y1999.pct_without_weakness, 100.0);
    EXPECT_DOUBLE_EQ(y1999.pct_with_tactic_path, 0.0);
    const auto& y2011 = years.at(2011);
    EXPECT_DOUBLE_EQ(y2011.pct_with_tactic_path, 100.0);
    EXPECT_DOUBLE_EQ(y2011.pct_with_pattern_path, 100.0);
    EXPECT_DOUBLE_EQ(y2011.pct_without_weakness, 0.0);
    EXPECT_EQ(y2011.paths_from_tactic, 4u);
    EXPECT_EQ(y2011.paths_from_pattern, 2u);
    EXPECT_EQ(y2011.paths_from_weakness, 2u);
    EXPECT_EQ(yearly_connectivity(fixtures::mini(), {}, CountMode::DistinctEndpointPairs).at(2011).paths_from_tactic, 2u);

    BronGraph empty;
    empty.seal();
    EXPECT_TRUE(yearly_connectivity(empty).empty());
}

TEST(Severity, MiniLedger) {
    const auto ledger = severity_ledger(fixtures::mini());
    EXPECT_EQ(ledger.all_years.unlinked_sum, Score::from_tenths(50));
    EXPECT_EQ(ledger.all_years.operational_sum, Score::from_tenths(68));
    EXPECT_EQ(ledger.all_years.total_sum, Score::from_tenths(118));
    EXPECT_EQ(ledger.all_years.total_sum.to_string(), "11.8");
    EXPECT_EQ(ledger.all_years.unlinked_count, 1u);
    EXPECT_EQ(ledger.all_years.operational_count, 1u);
    EXPECT_DOUBLE_EQ(ledger.all_years.zero_score_unlinked_fraction, 0.0);
    EXPECT_EQ(ledger.years.at(1999).unlinked_sum, Score::from_tenths(50));
    EXPECT_EQ(ledger.years.at(2011).operational_sum, Score::from_tenths(68));

    BronGraph empty;
    empty.seal();
    const auto none = severity_ledger(empty);
    EXPECT_TRUE(none.years.empty());
    EXPECT_EQ(none.all_years.total_sum, Score{});
}

TEST(Severity, MissingAndZeroScores) {
    std::vector<SourceRecord> records = {
        VulnRec{"CVE-2020-0001", "", Score::from_tenths(0), "v3", {}, {}, {}},
        VulnRec{"CVE-2020-0002", "", std::nullopt, "", {}, {}, {}},
        VulnRec{"CVE-2020-0003", "", Score::from_tenths(75), "v2", {}, {}, {}},
        VulnRec{"CVE-2020-0004", "", Score::from_tenths(99), "v3", {}, {{"cpe:2.3:a:acme:tool:1.0:*:*:*:*:*:*:*", std::nullopt}}, {}},
    };
    const auto g = build_graph(std::span<const SourceRecord>(records)).graph;
    const auto& y = severity_ledger(g).years.at(2020);
    EXPECT_EQ(y.unlinked_count, 3u);
    EXPECT_EQ(y.operational_count, 1u);
    EXPECT_EQ(y.missing_score_count, 1u);
    EXPECT_EQ(y.zero_score_unlinked, 2u);
    EXPECT_DOUBLE_EQ(y.zero_score_unlinked_fraction, 2.0 / 3.0);
    EXPECT_EQ(y.unlinked_sum, Score::from_tenths(75));
    EXPECT_EQ(y.total_sum, Score::from_tenths(174));
}

TEST(VendorMatrix, Mini) {
    const auto& g = fixtures::mini();
    const auto cells = vendor_tactic_matrix(g, {"Google", "acme"});
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[0], (VendorTacticCell{"Google", "TA0003", 1}));
    EXPECT_EQ(cells[1], (VendorTacticCell{"Google", "TA0005", 1}));
    EXPECT_EQ(cells[2], (VendorTacticCell{"acme", "TA0003", 0}));
    EXPECT_EQ(cells[3], (VendorTacticCell{"acme", "TA0005", 0}));
    const auto versions = vendor_tactic_matrix(g, {"google"}, MatrixMode::ProductVersions);
    EXPECT_EQ(versions[0].count, 2u);
    EXPECT_EQ(error_of([&] { vendor_tactic_matrix(g, {}); }), ErrorCode::InvalidArgument);
}

TEST(VendorSeverity, Mini) {
    const auto& g = fixtures::mini();
    const auto max = vendor_severity_distribution(g, {"google"});
    EXPECT_EQ(max.at("google"), std::vector<Score>{Score::from_tenths(68)});
    EXPECT_EQ(vendor_severity_distribution(g, {"google"}, SeverityScoring::AllScores).at("google"),
              std::vector<Score>{Score::from_tenths(68)});
    EXPECT_EQ(vendor_severity_distribution(g, {"google"}, SeverityScoring::MaxPerProduct, "TA0005").at("google").size(), 1u);
    EXPECT_TRUE(vendor_severity_distribution(g, {"acme"}).at("acme").empty());
    EXPECT_EQ(error_of([&] { vendor_severity_distribution(g, {"google"}, SeverityScoring::AllScores, "T1574"); }),
              ErrorCode::WrongKind);
    EXPECT_EQ(error_of([&] { vendor_severity_distribution(g, {"google"}, SeverityScoring::AllScores, "TA0404"); }),
              ErrorCode::UnknownNode);
}

TEST(VendorSeverity, MaxVersusAll) {
    std::vector<SourceRecord> records = {
        VulnRec{"CVE-2020-0001", "", Score::from_tenths(43), "v3", {}, {{"cpe:2.3:a:acme:tool:1.0:*:*:*:*:*:*:*", std::nullopt}}, {}},
        VulnRec{"CVE-2020-0002", "", Score::from_tenths(88), "v3", {}, {{"cpe:2.3:a:acme:tool:2.0:*:*:*:*:*:*:*", std::nullopt}}, {}},
        VulnRec{"CVE-2020-0003", "", std::nullopt, "", {}, {{"cpe:2.3:a:acme:blank:1.0:*:*:*:*:*:*:*", std::nullopt}}, {}},
    };
    const auto g = build_graph(std::span<const SourceRecord>(records)).graph;
    EXPECT_EQ(vendor_severity_distribution(g, {"acme"}).at("acme"), std::vector<Score>{Score::from_tenths(88)});
    EXPECT_EQ(vendor_severity_distribution(g, {"acme"}, SeverityScoring::AllScores).at("acme"),
              (std::vector<Score>{Score::from_tenths(43), Score::from_tenths(88)}));
}

TEST(ProductVersions, MiniChrome) {
    const auto rows = product_version_report(fixtures::mini(), "google", "chrome");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].version, "10.0.648.120");
    EXPECT_EQ(rows[1].version, "10.0.648.126");
    for (const auto& r : rows) EXPECT_EQ(r.counts, (std::array<std::size_t, 5>{2, 2, 1, 2, 1}));
    EXPECT_TRUE(product_version_report(fixtures::mini(), "google", "earth").empty());
}

TEST(Canned, Mini) {
    const auto& g = fixtures::mini();
    EXPECT_EQ(configs_for_tactic(g, "TA0003").size(), 2u);
    EXPECT_TRUE(techniques_for_vulnerability(g, "CVE-1999-0001").empty());
    EXPECT_EQ(techniques_for_vulnerability(g, "CVE-2011-1185"), (std::vector<std::string>{"T1574", "T1574.010"}));
    const auto tp = tactics_and_patterns_for_product(g, "google", "chrome");
    EXPECT_EQ(tp.tactics, (std::vector<std::string>{"TA0003", "TA0005"}));
    EXPECT_EQ(tp.patterns, std::vector<std::string>{"CAPEC-17"});
    EXPECT_EQ(tactics_and_patterns_for_product(g, "google", "chrome", "10.0.648.126"), tp);
    EXPECT_EQ(error_of([&] { tactics_and_patterns_for_product(g, "google", "chrome", "99"); }), ErrorCode::UnknownProduct);
    EXPECT_EQ(error_of([&] { tactics_and_patterns_for_product(g, "acme", "chrome"); }), ErrorCode::UnknownProduct);
    EXPECT_EQ(error_of([&] { configs_for_tactic(g, "TA0404"); }), ErrorCode::UnknownNode);
    EXPECT_EQ(error_of([&] { configs_for_tactic(g, "T1574"); }), ErrorCode::WrongKind);
}

TEST(Views, FilteredViewDropsNodesAndTheirEdges) {
    QueryFilter f;
    f.years = YearRange{2011, 2011};
    const auto view = filtered_view(fixtures::mini(), f);
    EXPECT_FALSE(view.contains("CVE-1999-0001"));
    EXPECT_EQ(view.node_count(), 12u);
    EXPECT_EQ(view.edge_count(), 10u);
    const auto ledger = severity_ledger(fixtures::mini(), f);
    EXPECT_EQ(ledger.all_years.total_sum, Score::from_tenths(68));
}

TEST(AnalyticsProperty, LedgerIdentityAndPartition) {
    testgen::Rng rng(5);
    for (int round = 0; round < 80; ++round) {
        const auto g = testgen::random_graph(rng, 60 + round);
        QueryFilter f;
        if (round % 3 == 1) f.latest_versions_only = true;
        if (round % 3 == 2) f.years = YearRange{2005, 2015};
        const auto ledger = severity_ledger(g, f);
        const auto view = filtered_view(g, f);
        std::size_t cves = 0;
        Score expected_unlinked;
        for (const auto& id : view.node_ids(NodeKind::Vulnerability)) {
            ++cves;
            if (!linked(view, id)) expected_unlinked += detail::node_score(view.node(id)).value_or(Score{});
        }
        EXPECT_EQ(ledger.all_years.unlinked_sum, expected_unlinked);
        EXPECT_EQ(ledger.all_years.unlinked_count + ledger.all_years.operational_count, cves);
        EXPECT_EQ(ledger.all_years.total_sum, ledger.all_years.unlinked_sum + ledger.all_years.operational_sum);
        std::size_t per_year = 0;
        for (const auto& [year, y] : ledger.years) {
            EXPECT_EQ(y.total_sum, y.unlinked_sum + y.operational_sum) << year;
            EXPECT_GE(y.unlinked_sum.tenths(), 0);
            EXPECT_GE(y.operational_sum.tenths(), 0);
            per_year += y.unlinked_count + y.operational_count;
        }
        EXPECT_EQ(per_year, cves);
    }
}

TEST(AnalyticsProperty, InventoryCountsCoverEveryNode) {
    testgen::Rng rng(8);
    for (int round = 0; round < 50; ++round) {
        const auto g = testgen::random_graph(rng, 120);
        for (const auto& row : inventory_report(g)) {
            EXPECT_EQ(row.total_entries + row.floater_count, g.node_count(row.kind));
            EXPECT_EQ(row.floater_count, partition_floaters(g, row.kind).floaters.size());
            if (row.total_entries > 0) {
                EXPECT_LE(row.min_links, row.median_links);
                EXPECT_LE(row.median_links, row.max_links);
                EXPECT_EQ(row.range, row.max_links - row.min_links);
            }
        }
    }
}

TEST(AnalyticsProperty, LatestViewNeverIncreasesCounts) {
    testgen::Rng rng(21);
    for (int round = 0; round < 40; ++round) {
        const auto g = testgen::random_graph(rng, 120);
        const auto latest = latest_version_view(g).graph;
        EXPECT_LE(latest.node_count(), g.node_count());
        EXPECT_LE(latest.edge_count(), g.edge_count());
        for (auto from : kAllKinds) {
            for (auto to : kAllKinds) {
                EXPECT_LE(count_paths(latest, from, to), count_paths(g, from, to));
                EXPECT_LE(count_paths(latest, from, to, {}, CountMode::DistinctEndpointPairs),
                          count_paths(g, from, to, {}, CountMode::DistinctEndpointPairs));
            }
        }
        const auto full_inv = inventory_report(g);
        const auto latest_inv = inventory_report(latest);
        for (std::size_t i = 0; i < full_inv.size(); ++i) {
            EXPECT_LE(latest_inv[i].total_entries + latest_inv[i].floater_count,
                      full_inv[i].total_entries + full_inv[i].floater_count);
            EXPECT_LE(latest_inv[i].max_links, full_inv[i].max_links);
        }
        const auto full_sev = severity_ledger(g).all_years;
        const auto latest_sev = severity_ledger(latest).all_years;
        EXPECT_LE(latest_sev.operational_sum, full_sev.operational_sum);
        EXPECT_LE(latest_sev.operational_count, full_sev.operational_count);
        EXPECT_EQ(latest_sev.total_sum, full_sev.total_sum);

        const auto vendors = vendors_of(g);
        const auto full_cells = vendor_tactic_matrix(g, vendors, MatrixMode::ProductVersions);
        const auto latest_cells = vendor_tactic_matrix(latest, vendors, MatrixMode::ProductVersions);
        ASSERT_EQ(full_cells.size(), latest_cells.size());
        for (std::size_t i = 0; i < full_cells.size(); ++i) EXPECT_LE(latest_cells[i].count, full_cells[i].count);

        const auto full_trend = yearly_connectivity(g);
        for (const auto& [year, y] : yearly_connectivity(latest)) {
            EXPECT_LE(y.with_tactic_path, full_trend.at(year).with_tactic_path);
            EXPECT_LE(y.paths_from_tactic, full_trend.at(year).paths_from_tactic);
        }
    }
}

TEST(AnalyticsProperty, MatrixCellsBoundedByProducts) {
    testgen::Rng rng(34);
    for (int round = 0; round < 40; ++round) {
        const auto g = testgen::random_graph(rng, 120);
        std::map<std::string, std::set<std::string>> products;
        for (const auto& id : g.node_ids(NodeKind::AffectedProductConfiguration)) {
            const auto cpe = parse_cpe23(id);
            products[cpe.vendor().text()].insert(cpe.product().text());
        }
        for (const auto& cell : vendor_tactic_matrix(g, vendors_of(g))) {
            EXPECT_LE(cell.count, products[cell.vendor].size());
        }
    }
}

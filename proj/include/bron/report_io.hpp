#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bron/analytics.hpp"
#include "bron/ingest/build.hpp"
#include "bron/ingest/interchange.hpp"
#include "bron/query.hpp"

namespace bron {

// Reports as line records in the interchange style (one JSON object per
// line with a "t" tag), plus plain aligned tables for terminals.

using Record = nlohmann::ordered_json;
using Records = std::vector<Record>;

inline Record path_record(const Path& path) {
    Record r;
    r["t"] = "path";
    r["nodes"] = path.nodes;
    return r;
}

inline Records inventory_records(const std::vector<InventoryRow>& rows) {
    Records out;
    for (const auto& row : rows) {
        Record r;
        r["t"] = "inventory";
        r["kind"] = std::string(to_string(row.kind));
        r["total_entries"] = row.total_entries;
        r["median_links"] = row.median_links;
        r["min_links"] = row.min_links;
        r["max_links"] = row.max_links;
        r["range"] = row.range;
        r["floater_count"] = row.floater_count;
        out.push_back(std::move(r));
    }
    return out;
}

inline Records trend_records(const std::map<int, YearConnectivity>& years) {
    Records out;
    for (const auto& [year, row] : years) {
        Record r;
        r["t"] = "trend";
        r["year"] = year;
        r["cve_count"] = row.cve_count;
        r["pct_with_tactic_path"] = row.pct_with_tactic_path;
        r["pct_with_pattern_path"] = row.pct_with_pattern_path;
        r["pct_without_weakness"] = row.pct_without_weakness;
        r["paths_from_tactic"] = row.paths_from_tactic;
        r["paths_from_pattern"] = row.paths_from_pattern;
        r["paths_from_weakness"] = row.paths_from_weakness;
        out.push_back(std::move(r));
    }
    return out;
}

namespace detail {

inline Record severity_record(const Record& year, const YearSeverity& row) {
    Record r;
    r["t"] = "severity";
    r["year"] = year;
    r["unlinked"] = row.unlinked_sum.value();
    r["operational"] = row.operational_sum.value();
    r["total"] = row.total_sum.value();
    r["unlinked_count"] = row.unlinked_count;
    r["operational_count"] = row.operational_count;
    r["zero_score_unlinked_fraction"] = row.zero_score_unlinked_fraction;
    r["missing_score_count"] = row.missing_score_count;
    return r;
}

} // namespace detail

/// Per-year rows followed by an "all" row.
inline Records severity_records(const SeverityLedger& ledger) {
    Records out;
    for (const auto& [year, row] : ledger.years) out.push_back(detail::severity_record(year, row));
    out.push_back(detail::severity_record("all", ledger.all_years));
    return out;
}

inline Records vendor_tactic_records(const std::vector<VendorTacticCell>& cells) {
    Records out;
    for (const auto& cell : cells) {
        Record r;
        r["t"] = "vendor_tactic";
        r["vendor"] = cell.vendor;
        r["tactic"] = cell.tactic_id;
        r["count"] = cell.count;
        out.push_back(std::move(r));
    }
    return out;
}

inline Records vendor_severity_records(const std::map<std::string, std::vector<Score>>& dist) {
    Records out;
    for (const auto& [vendor, scores] : dist) {
        Record r;
        r["t"] = "vendor_severity";
        r["vendor"] = vendor;
        r["scores"] = Record::array();
        for (auto s : scores) r["scores"].push_back(s.value());
        out.push_back(std::move(r));
    }
    return out;
}

inline constexpr std::array<const char*, kThreatKinds.size()> kThreatKindFields = {
    "tactics", "techniques", "attack_patterns", "weaknesses", "vulnerabilities"};

inline Records product_version_records(const std::vector<ProductVersionRow>& rows) {
    Records out;
    for (const auto& row : rows) {
        Record r;
        r["t"] = "product_version";
        r["configuration"] = row.configuration_id;
        r["version"] = row.version;
        for (std::size_t i = 0; i < kThreatKinds.size(); ++i) r[kThreatKindFields[i]] = row.counts[i];
        out.push_back(std::move(r));
    }
    return out;
}

inline Record build_report_record(const BuildReport& report) {
    Record r;
    r["t"] = "build";
    r["nodes"] = report.node_total();
    r["edges"] = report.edge_total();
    r["node_counts"] = Record::object();
    for (auto kind : kAllKinds) r["node_counts"][std::string(to_string(kind))] = report.node_counts[kind_index(kind)];
    r["edge_counts"] = Record::object();
    for (const auto& [pair, n] : report.edge_counts) {
        r["edge_counts"][std::string(to_string(pair.first)) + "->" + std::string(to_string(pair.second))] = n;
    }
    r["dangling_refs"] = Record::array();
    for (const auto& d : report.dangling_refs) r["dangling_refs"].push_back({d.from_id, d.missing_id});
    r["malformed_refs"] = Record::array();
    for (const auto& d : report.malformed_refs) r["malformed_refs"].push_back({d.from_id, d.missing_id});
    r["duplicate_records"] = report.duplicate_records;
    r["duplicate_edges"] = report.duplicate_edges;
    return r;
}

inline void write_records(const Records& records, std::ostream& out) {
    for (const auto& r : records) out << detail::dump_line(r) << '\n';
}

// ------------------------------------------------------------------ tables

class TextTable {
public:
    explicit TextTable(std::vector<std::string> headers) : headers_(std::move(headers)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& out) const {
        std::vector<std::size_t> widths(headers_.size());
        for (std::size_t i = 0; i < headers_.size(); ++i) widths[i] = headers_[i].size();
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
        }
        const auto line = [&](const std::vector<std::string>& cells) {
            std::string text;
            for (std::size_t i = 0; i < widths.size(); ++i) {
                const std::string cell = i < cells.size() ? cells[i] : std::string();
                text += cell;
                if (i + 1 < widths.size()) text += std::string(widths[i] - cell.size() + 2, ' ');
            }
            out << text << '\n';
        };
        line(headers_);
        std::vector<std::string> rule;
        for (auto w : widths) rule.emplace_back(w, '-');
        line(rule);
        for (const auto& row : rows_) line(row);
    }

private:
    std::vector<std::string> headers_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string fixed(double value, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

/// Tabular rendering of report records produced by the functions above.
/// Column order follows the record's field order, "t" omitted.
inline void print_table(const Records& records, std::ostream& out) {
    if (records.empty()) {
        out << "(no rows)\n";
        return;
    }
    std::vector<std::string> headers;
    for (const auto& [key, value] : records.front().items()) {
        if (key != "t") headers.push_back(key);
    }
    TextTable table(headers);
    for (const auto& r : records) {
        std::vector<std::string> row;
        for (const auto& key : headers) {
            const auto it = r.find(key);
            if (it == r.end()) {
                row.emplace_back();
            } else if (it->is_string()) {
                row.push_back(it->get<std::string>());
            } else if (it->is_number_float()) {
                row.push_back(fixed(it->get<double>(), key.rfind("pct_", 0) == 0 || key.find("fraction") != std::string::npos ? 2 : 1));
            } else if (it->is_array()) {
                std::string joined;
                for (const auto& v : *it) {
                    if (!joined.empty()) joined += ' ';
                    joined += v.is_string() ? v.get<std::string>() : v.is_number_float() ? fixed(v.get<double>(), 1) : v.dump();
                }
                row.push_back(joined);
            } else {
                row.push_back(it->dump());
            }
        }
        table.add(std::move(row));
    }
    table.print(out);
}

} // namespace bron

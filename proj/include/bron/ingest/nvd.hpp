#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "bron/cpe.hpp"
#include "bron/ingest/json_input.hpp"
#include "bron/records.hpp"

namespace bron::ingest {

namespace detail {

inline std::optional<VersionRange> version_range_of(const json& match) {
    VersionRange range;
    bool any = false;
    if (auto v = string_or(match, "versionStartIncluding"); !v.empty()) {
        range.start = v;
        range.start_inclusive = true;
        any = true;
    } else if (auto w = string_or(match, "versionStartExcluding"); !w.empty()) {
        range.start = w;
        range.start_inclusive = false;
        any = true;
    }
    if (auto v = string_or(match, "versionEndIncluding"); !v.empty()) {
        range.end = v;
        range.end_inclusive = true;
        any = true;
    } else if (auto w = string_or(match, "versionEndExcluding"); !w.empty()) {
        range.end = w;
        range.end_inclusive = false;
        any = true;
    }
    if (!any) return std::nullopt;
    return range;
}

// Leaf matches of one configuration node, recursing into children. Only
// matches flagged vulnerable are affected configurations.
inline void collect_matches(const json& node, VulnRec& rec) {
    for (auto key : {"cpe_match", "cpeMatch"}) {
        auto matches = node.find(key);
        if (matches == node.end() || !matches->is_array()) continue;
        for (const auto& match : *matches) {
            if (!bool_or(match, "vulnerable", true)) continue;
            auto cpe = string_or(match, "cpe23Uri");
            if (cpe.empty()) cpe = string_or(match, "criteria");
            if (cpe.empty()) continue;
            try {
                (void)parse_cpe23(cpe);
            } catch (const Error&) {
                rec.rejected_cpes.push_back(cpe);
                continue;
            }
            rec.cpe_matches.push_back(CpeMatch{cpe, version_range_of(match)});
        }
    }
    if (auto children = node.find("children"); children != node.end() && children->is_array()) {
        for (const auto& child : *children) collect_matches(child, rec);
    }
}

inline void collect_configuration_nodes(const json& nodes, VulnRec& rec) {
    if (!nodes.is_array()) return;
    for (const auto& node : nodes) collect_matches(node, rec);
}

inline std::string english_text(const json& list) {
    if (!list.is_array()) return {};
    for (const auto& entry : list) {
        if (string_or(entry, "lang") == "en") return string_or(entry, "value");
    }
    return list.empty() ? std::string() : string_or(list.front(), "value");
}

inline void add_cwe_values(const json& descriptions, VulnRec& rec) {
    static const std::regex cwe_re(R"(CWE-\d+)");
    if (!descriptions.is_array()) return;
    for (const auto& d : descriptions) {
        // NVD-CWE-Other / NVD-CWE-noinfo carry no linkage and are skipped.
        auto value = string_or(d, "value");
        if (std::regex_match(value, cwe_re)) rec.cwe_ids.push_back(value);
    }
}

inline std::optional<Score> score_of(const json& holder, std::string_view key) {
    auto it = holder.find(key);
    if (it == holder.end()) return std::nullopt;
    if (it->is_number()) return Score::from_double(it->get<double>());
    if (it->is_string()) return Score::parse(it->get<std::string>());
    return std::nullopt;
}

inline void finish(VulnRec& rec) {
    static const std::regex cve_re(R"(CVE-\d{4}-\d+)");
    if (!std::regex_match(rec.id, cve_re)) {
        throw Error(ErrorCode::SchemaError, "CVE feed: id '" + rec.id + "' does not match CVE-YYYY-N");
    }
    std::sort(rec.cwe_ids.begin(), rec.cwe_ids.end());
    rec.cwe_ids.erase(std::unique(rec.cwe_ids.begin(), rec.cwe_ids.end()), rec.cwe_ids.end());
}

inline VulnRec legacy_item(const json& item) {
    VulnRec rec;
    const auto& cve = require_field(item, "cve", "CVE_Items[]");
    rec.id = require_string(require_field(cve, "CVE_data_meta", "cve"), "ID", "cve.CVE_data_meta");
    if (auto d = cve.find("description"); d != cve.end()) {
        if (auto data = d->find("description_data"); data != d->end()) rec.description = english_text(*data);
    }
    if (auto p = cve.find("problemtype"); p != cve.end()) {
        if (auto data = p->find("problemtype_data"); data != p->end() && data->is_array()) {
            for (const auto& entry : *data) {
                if (auto desc = entry.find("description"); desc != entry.end()) add_cwe_values(*desc, rec);
            }
        }
    }
    if (auto impact = item.find("impact"); impact != item.end() && impact->is_object()) {
        if (auto m3 = impact->find("baseMetricV3"); m3 != impact->end()) {
            if (auto c = m3->find("cvssV3"); c != m3->end()) {
                if (auto s = score_of(*c, "baseScore")) {
                    rec.cvss_score = s;
                    rec.cvss_version = "v3";
                }
            }
        }
        if (!rec.cvss_score) {
            if (auto m2 = impact->find("baseMetricV2"); m2 != impact->end()) {
                if (auto c = m2->find("cvssV2"); c != m2->end()) {
                    if (auto s = score_of(*c, "baseScore")) {
                        rec.cvss_score = s;
                        rec.cvss_version = "v2";
                    }
                }
            }
        }
    }
    if (auto conf = item.find("configurations"); conf != item.end() && conf->is_object()) {
        if (auto nodes = conf->find("nodes"); nodes != conf->end()) collect_configuration_nodes(*nodes, rec);
    }
    finish(rec);
    return rec;
}

inline std::optional<Score> api_metric_score(const json& metrics, std::string_view key) {
    auto list = metrics.find(key);
    if (list == metrics.end() || !list->is_array() || list->empty()) return std::nullopt;
    const json* chosen = &list->front();
    for (const auto& m : *list) {
        if (string_or(m, "type") == "Primary") {
            chosen = &m;
            break;
        }
    }
    auto data = chosen->find("cvssData");
    if (data == chosen->end()) return std::nullopt;
    return score_of(*data, "baseScore");
}

inline VulnRec api_item(const json& item) {
    VulnRec rec;
    const auto& cve = require_field(item, "cve", "vulnerabilities[]");
    rec.id = require_string(cve, "id", "vulnerabilities[].cve");
    if (auto d = cve.find("descriptions"); d != cve.end()) rec.description = english_text(*d);
    if (auto w = cve.find("weaknesses"); w != cve.end() && w->is_array()) {
        for (const auto& entry : *w) {
            if (auto desc = entry.find("description"); desc != entry.end()) add_cwe_values(*desc, rec);
        }
    }
    if (auto metrics = cve.find("metrics"); metrics != cve.end() && metrics->is_object()) {
        for (auto key : {"cvssMetricV31", "cvssMetricV30"}) {
            if (auto s = api_metric_score(*metrics, key)) {
                rec.cvss_score = s;
                rec.cvss_version = "v3";
                break;
            }
        }
        if (!rec.cvss_score) {
            if (auto s = api_metric_score(*metrics, "cvssMetricV2")) {
                rec.cvss_score = s;
                rec.cvss_version = "v2";
            }
        }
    }
    if (auto confs = cve.find("configurations"); confs != cve.end() && confs->is_array()) {
        for (const auto& conf : *confs) {
            if (auto nodes = conf.find("nodes"); nodes != conf.end()) collect_configuration_nodes(*nodes, rec);
        }
    }
    finish(rec);
    return rec;
}

} // namespace detail

/// Loads an NVD CVE feed. Accepts the 1.1 JSON data feeds ("CVE_Items") and
/// the 2.0 API response shape ("vulnerabilities"). Configuration trees are
/// flattened to their vulnerable leaf matches; CVSS v3 is preferred over v2.
/// Matches whose CPE string does not parse are dropped and listed in
/// VulnRec::rejected_cpes.
inline std::vector<SourceRecord> load_cve_feed(std::istream& in) {
    const json doc = read_json_document(in, "CVE feed");
    if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "CVE feed: top level must be an object");
    std::vector<SourceRecord> out;
    if (auto items = doc.find("CVE_Items"); items != doc.end()) {
        if (!items->is_array()) throw Error(ErrorCode::SchemaError, "CVE feed: 'CVE_Items' is not an array");
        for (const auto& item : *items) out.emplace_back(detail::legacy_item(item));
    } else if (auto vulns = doc.find("vulnerabilities"); vulns != doc.end()) {
        if (!vulns->is_array()) throw Error(ErrorCode::SchemaError, "CVE feed: 'vulnerabilities' is not an array");
        for (const auto& item : *vulns) out.emplace_back(detail::api_item(item));
    } else {
        throw Error(ErrorCode::SchemaError, "CVE feed: missing field 'CVE_Items' (or 'vulnerabilities')");
    }
    return out;
}

} // namespace bron::ingest

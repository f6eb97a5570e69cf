#pragma once

#include <algorithm>
#include <istream>
#include <regex>
#include <string>
#include <vector>

#include "bron/ingest/xml_input.hpp"
#include "bron/records.hpp"

namespace bron::ingest {

inline bool is_retired_status(const std::string& status) { return status == "Deprecated" || status == "Obsolete"; }

/// Loads the CAPEC XML catalog (Attack_Pattern_Catalog/Attack_Patterns).
/// Deprecated and obsolete patterns are omitted.
inline std::vector<SourceRecord> load_capec(std::istream& in) {
    const XmlTree doc = read_xml_document(in, "CAPEC catalog");
    std::vector<SourceRecord> out;
    const XmlTree* catalog = xml_child(doc, "Attack_Pattern_Catalog");
    if (catalog == nullptr) throw Error(ErrorCode::SchemaError, "CAPEC catalog: missing element 'Attack_Pattern_Catalog'");
    const XmlTree* patterns = xml_child(*catalog, "Attack_Patterns");
    if (patterns == nullptr) return out;

    static const std::regex number_re(R"(\d+)");
    for (const XmlTree* pattern : xml_children(*patterns, "Attack_Pattern")) {
        const auto raw_id = xml_attribute(*pattern, "ID");
        if (raw_id.empty()) throw Error(ErrorCode::SchemaError, "CAPEC catalog: Attack_Pattern missing attribute 'ID'");
        if (!std::regex_match(raw_id, number_re)) {
            throw Error(ErrorCode::SchemaError, "CAPEC catalog: Attack_Pattern ID '" + raw_id + "' is not numeric");
        }
        const std::string context = "CAPEC-" + raw_id;
        const auto name = xml_attribute(*pattern, "Name");
        if (name.empty()) throw Error(ErrorCode::SchemaError, context + ": missing attribute 'Name'");
        const auto status = xml_attribute(*pattern, "Status");
        if (is_retired_status(status)) continue;

        PatternRec rec;
        rec.id = context;
        rec.name = name;
        if (const XmlTree* description = xml_child(*pattern, "Description")) {
            if (auto text = xml_text(*description); !text.empty()) rec.properties["description"] = text;
        }
        if (auto abstraction = xml_attribute(*pattern, "Abstraction"); !abstraction.empty()) {
            rec.properties["abstraction"] = abstraction;
        }
        if (!status.empty()) rec.properties["status"] = status;
        if (const XmlTree* related = xml_child(*pattern, "Related_Weaknesses")) {
            for (const XmlTree* weakness : xml_children(*related, "Related_Weakness")) {
                const auto cwe = xml_attribute(*weakness, "CWE_ID");
                if (!std::regex_match(cwe, number_re)) {
                    throw Error(ErrorCode::SchemaError, context + ": Related_Weakness has bad 'CWE_ID' '" + cwe + "'");
                }
                rec.cwe_ids.push_back("CWE-" + cwe);
            }
        }
        std::sort(rec.cwe_ids.begin(), rec.cwe_ids.end());
        rec.cwe_ids.erase(std::unique(rec.cwe_ids.begin(), rec.cwe_ids.end()), rec.cwe_ids.end());
        out.emplace_back(std::move(rec));
    }
    return out;
}

} // namespace bron::ingest

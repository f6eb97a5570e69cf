#pragma once

#include <istream>
#include <regex>
#include <string>
#include <vector>

#include "bron/ingest/capec.hpp"
#include "bron/ingest/xml_input.hpp"
#include "bron/records.hpp"

namespace bron::ingest {

/// Loads the CWE XML catalog. Both Weakness and Category entries become
/// WeaknessRec (NVD references categories such as CWE-264 directly).
/// Hierarchy relations are not read.
inline std::vector<SourceRecord> load_cwe(std::istream& in) {
    const XmlTree doc = read_xml_document(in, "CWE catalog");
    std::vector<SourceRecord> out;
    const XmlTree* catalog = xml_child(doc, "Weakness_Catalog");
    if (catalog == nullptr) throw Error(ErrorCode::SchemaError, "CWE catalog: missing element 'Weakness_Catalog'");

    static const std::regex number_re(R"(\d+)");
    auto load_group = [&](std::string_view group_name, std::string_view entry_name) {
        const XmlTree* group = xml_child(*catalog, group_name);
        if (group == nullptr) return;
        for (const XmlTree* entry : xml_children(*group, entry_name)) {
            const auto raw_id = xml_attribute(*entry, "ID");
            if (!std::regex_match(raw_id, number_re)) {
                throw Error(ErrorCode::SchemaError,
                            "CWE catalog: " + std::string(entry_name) + " has missing or bad attribute 'ID' '" + raw_id + "'");
            }
            const std::string id = "CWE-" + raw_id;
            const auto name = xml_attribute(*entry, "Name");
            if (name.empty()) throw Error(ErrorCode::SchemaError, id + ": missing attribute 'Name'");
            const auto status = xml_attribute(*entry, "Status");
            if (is_retired_status(status)) continue;
            WeaknessRec rec{id, name, {}};
            rec.properties["entry_type"] = std::string(entry_name);
            if (!status.empty()) rec.properties["status"] = status;
            if (auto abstraction = xml_attribute(*entry, "Abstraction"); !abstraction.empty()) {
                rec.properties["abstraction"] = abstraction;
            }
            for (auto field : {"Description", "Summary"}) {
                if (const XmlTree* d = xml_child(*entry, field)) {
                    if (auto text = xml_text(*d); !text.empty()) {
                        rec.properties["description"] = text;
                        break;
                    }
                }
            }
            out.emplace_back(std::move(rec));
        }
    };
    load_group("Weaknesses", "Weakness");
    load_group("Categories", "Category");
    return out;
}

} // namespace bron::ingest

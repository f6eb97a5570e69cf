#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "bron/ingest/json_input.hpp"
#include "bron/records.hpp"

namespace bron::ingest {

namespace detail {

inline std::optional<std::string> external_id(const json& object, std::string_view source_name) {
    auto refs = object.find("external_references");
    if (refs == object.end() || !refs->is_array()) return std::nullopt;
    for (const auto& ref : *refs) {
        if (string_or(ref, "source_name") == source_name) {
            auto id = string_or(ref, "external_id");
            if (!id.empty()) return id;
        }
    }
    return std::nullopt;
}

inline bool is_retired(const json& object) {
    return bool_or(object, "revoked", false) || bool_or(object, "x_mitre_deprecated", false);
}

} // namespace detail

/// Loads an ATT&CK STIX 2.x bundle: `x-mitre-tactic` objects become
/// TacticRec, `attack-pattern` objects become TechniqueRec. Tactic membership
/// comes from kill_chain_phases, sub-technique parents from `subtechnique-of`
/// relationships (falling back to the dotted id), and CAPEC cross references
/// from external_references. Revoked and deprecated objects are dropped.
inline std::vector<SourceRecord> load_attack(std::istream& in) {
    const json doc = read_json_document(in, "ATT&CK bundle");
    std::vector<SourceRecord> out;
    if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "ATT&CK bundle: top level must be an object");
    auto objects_it = doc.find("objects");
    if (objects_it == doc.end()) {
        if (string_or(doc, "type") == "bundle") return out;
        throw Error(ErrorCode::SchemaError, "ATT&CK bundle: missing field 'objects'");
    }
    if (!objects_it->is_array()) throw Error(ErrorCode::SchemaError, "ATT&CK bundle: 'objects' is not an array");
    const json& objects = *objects_it;

    static const std::regex tactic_re(R"(TA\d{4})");
    static const std::regex technique_re(R"(T\d{4}(\.\d{3})?)");

    std::map<std::string, std::string> tactic_by_shortname;
    std::map<std::string, std::string> attack_id_by_stix_id;
    std::map<std::string, std::string> parent_stix_by_child_stix;

    for (const auto& obj : objects) {
        const auto type = string_or(obj, "type");
        if (type == "relationship") {
            if (string_or(obj, "relationship_type") == "subtechnique-of" && !detail::is_retired(obj)) {
                parent_stix_by_child_stix[require_string(obj, "source_ref", "relationship")] =
                    require_string(obj, "target_ref", "relationship");
            }
            continue;
        }
        if (type != "x-mitre-tactic" && type != "attack-pattern") continue;
        const auto stix_id = string_or(obj, "id");
        const std::string context = type + " " + stix_id;
        if (detail::is_retired(obj)) continue;
        auto attack_id = detail::external_id(obj, "mitre-attack");
        if (!attack_id) {
            throw Error(ErrorCode::SchemaError, context + ": missing field 'external_references[mitre-attack].external_id'");
        }
        attack_id_by_stix_id[stix_id] = *attack_id;
        if (type == "x-mitre-tactic") {
            if (!std::regex_match(*attack_id, tactic_re)) {
                throw Error(ErrorCode::SchemaError, context + ": tactic id '" + *attack_id + "' does not match TAnnnn");
            }
            const auto shortname = require_string(obj, "x_mitre_shortname", context);
            tactic_by_shortname[shortname] = *attack_id;
        } else if (!std::regex_match(*attack_id, technique_re)) {
            throw Error(ErrorCode::SchemaError, context + ": technique id '" + *attack_id + "' does not match Tnnnn[.nnn]");
        }
    }

    for (const auto& obj : objects) {
        const auto type = string_or(obj, "type");
        if ((type != "x-mitre-tactic" && type != "attack-pattern") || detail::is_retired(obj)) continue;
        const auto stix_id = string_or(obj, "id");
        const std::string context = type + " " + stix_id;
        const auto& attack_id = attack_id_by_stix_id.at(stix_id);
        const auto name = require_string(obj, "name", context);
        Properties props;
        if (auto d = string_or(obj, "description"); !d.empty()) props["description"] = d;

        if (type == "x-mitre-tactic") {
            props["shortname"] = string_or(obj, "x_mitre_shortname");
            out.emplace_back(TacticRec{attack_id, name, std::move(props)});
            continue;
        }

        TechniqueRec rec;
        rec.id = attack_id;
        rec.name = name;
        if (auto phases = obj.find("kill_chain_phases"); phases != obj.end() && phases->is_array()) {
            for (const auto& phase : *phases) {
                const auto phase_name = string_or(phase, "phase_name");
                if (phase_name.empty()) continue;
                auto t = tactic_by_shortname.find(phase_name);
                // Unresolved phases stay as the shortname and surface as dangling references.
                rec.tactic_ids.push_back(t != tactic_by_shortname.end() ? t->second : phase_name);
            }
        }
        if (auto p = parent_stix_by_child_stix.find(stix_id); p != parent_stix_by_child_stix.end()) {
            auto parent = attack_id_by_stix_id.find(p->second);
            if (parent != attack_id_by_stix_id.end()) rec.parent_id = parent->second;
        }
        if (!rec.parent_id) {
            if (auto dot = attack_id.find('.'); dot != std::string::npos) rec.parent_id = attack_id.substr(0, dot);
        }
        if (auto refs = obj.find("external_references"); refs != obj.end() && refs->is_array()) {
            for (const auto& ref : *refs) {
                if (string_or(ref, "source_name") != "capec") continue;
                auto id = string_or(ref, "external_id");
                if (!id.empty()) rec.capec_ids.push_back(id);
            }
        }
        std::sort(rec.tactic_ids.begin(), rec.tactic_ids.end());
        rec.tactic_ids.erase(std::unique(rec.tactic_ids.begin(), rec.tactic_ids.end()), rec.tactic_ids.end());
        std::sort(rec.capec_ids.begin(), rec.capec_ids.end());
        rec.capec_ids.erase(std::unique(rec.capec_ids.begin(), rec.capec_ids.end()), rec.capec_ids.end());
        rec.properties = std::move(props);
        out.emplace_back(std::move(rec));
    }
    return out;
}

} // namespace bron::ingest

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bron/graph.hpp"
#include "bron/score.hpp"

namespace bron {

struct TacticRec {
    std::string id;  // TA0003
    std::string name;
    Properties properties;

    bool operator==(const TacticRec&) const = default;
};

struct TechniqueRec {
    std::string id;  // T1574 or T1574.010
    std::string name;
    std::vector<std::string> tactic_ids;
    std::optional<std::string> parent_id;
    std::vector<std::string> capec_ids;
    Properties properties;

    bool operator==(const TechniqueRec&) const = default;
};

struct PatternRec {
    std::string id;  // CAPEC-17
    std::string name;
    std::vector<std::string> cwe_ids;
    Properties properties;

    bool operator==(const PatternRec&) const = default;
};

struct WeaknessRec {
    std::string id;  // CWE-264
    std::string name;
    Properties properties;

    bool operator==(const WeaknessRec&) const = default;
};

struct CpeMatch {
    std::string cpe;  // as written in the feed
    std::optional<VersionRange> version_range;

    bool operator==(const CpeMatch&) const = default;
};

struct VulnRec {
    std::string id;  // CVE-2011-1185
    std::string description;
    std::optional<Score> cvss_score;
    std::string cvss_version;  // "v3", "v2" or "" when unscored
    std::vector<std::string> cwe_ids;
    std::vector<CpeMatch> cpe_matches;
    // Matches whose CPE string failed to parse; kept for the build report.
    std::vector<std::string> rejected_cpes;

    bool operator==(const VulnRec&) const = default;
};

using SourceRecord = std::variant<TacticRec, TechniqueRec, PatternRec, WeaknessRec, VulnRec>;

} // namespace bron

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "bron/error.hpp"

namespace bron {

// Declaration order is the layer order, top to bottom.
enum class NodeKind : int {
    Tactic = 0,
    Technique,
    AttackPattern,
    Weakness,
    Vulnerability,
    AffectedProductConfiguration,
};

inline constexpr std::size_t kNodeKindCount = 6;

inline constexpr std::array<NodeKind, kNodeKindCount> kAllKinds = {
    NodeKind::Tactic,        NodeKind::Technique,     NodeKind::AttackPattern,
    NodeKind::Weakness,      NodeKind::Vulnerability, NodeKind::AffectedProductConfiguration,
};

constexpr int layer(NodeKind kind) { return static_cast<int>(kind); }

constexpr std::size_t kind_index(NodeKind kind) { return static_cast<std::size_t>(kind); }

constexpr std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Tactic: return "Tactic";
        case NodeKind::Technique: return "Technique";
        case NodeKind::AttackPattern: return "AttackPattern";
        case NodeKind::Weakness: return "Weakness";
        case NodeKind::Vulnerability: return "Vulnerability";
        case NodeKind::AffectedProductConfiguration: return "AffectedProductConfiguration";
    }
    return "?";
}

/// Accepts the canonical names plus the short aliases used on the command
/// line and in query strings ("configuration", "cve", "attack-pattern", ...).
/// Matching is case-insensitive.
inline std::optional<NodeKind> parse_node_kind(std::string_view text) {
    std::string key;
    key.reserve(text.size());
    for (char c : text) {
        if (c == '-' || c == '_' || c == ' ') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    struct Alias {
        std::string_view name;
        NodeKind kind;
    };
    static constexpr Alias aliases[] = {
        {"tactic", NodeKind::Tactic},
        {"technique", NodeKind::Technique},
        {"attackpattern", NodeKind::AttackPattern},
        {"pattern", NodeKind::AttackPattern},
        {"capec", NodeKind::AttackPattern},
        {"weakness", NodeKind::Weakness},
        {"cwe", NodeKind::Weakness},
        {"vulnerability", NodeKind::Vulnerability},
        {"cve", NodeKind::Vulnerability},
        {"affectedproductconfiguration", NodeKind::AffectedProductConfiguration},
        {"configuration", NodeKind::AffectedProductConfiguration},
        {"config", NodeKind::AffectedProductConfiguration},
        {"cpe", NodeKind::AffectedProductConfiguration},
    };
    for (const auto& alias : aliases) {
        if (alias.name == key) return alias.kind;
    }
    return std::nullopt;
}

inline NodeKind node_kind_from_string(std::string_view text) {
    if (auto kind = parse_node_kind(text)) return *kind;
    throw Error(ErrorCode::InvalidArgument, "unknown node kind '" + std::string(text) + "'");
}

/// Stored edges always point from the upper layer to the lower one, except
/// the parent->sub-technique edge which stays inside the Technique layer.
constexpr bool is_allowed_pair(NodeKind src, NodeKind dst) {
    if (src == NodeKind::Technique && dst == NodeKind::Technique) return true;
    return layer(dst) == layer(src) + 1;
}

} // namespace bron

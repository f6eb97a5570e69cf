#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bron/analytics.hpp"
#include "bron/error.hpp"
#include "bron/node_kind.hpp"
#include "bron/query.hpp"

namespace bron {

// Text forms of query options, shared by the CLI flags and the HTTP query
// string. Every parser throws InvalidArgument on bad input.

inline int parse_int(std::string_view text, std::string_view what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + ": '" + std::string(text) + "' is not an integer");
    }
    return value;
}

inline std::size_t parse_limit(std::string_view text) {
    const int n = parse_int(text, "limit");
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "limit must not be negative");
    if (n == 0) throw Error(ErrorCode::LimitZero, "limit must be positive");
    return static_cast<std::size_t>(n);
}

/// "2011" or "2008:2012" (inclusive).
inline YearRange parse_year_range(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        const int y = parse_int(text, "years");
        return {y, y};
    }
    YearRange r{parse_int(text.substr(0, colon), "years"), parse_int(text.substr(colon + 1), "years")};
    if (r.first > r.last) throw Error(ErrorCode::InvalidArgument, "years: range start is after its end");
    return r;
}

inline bool parse_flag(std::string_view text, std::string_view what) {
    if (text.empty() || text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": expected a boolean, got '" + std::string(text) + "'");
}

/// Splits on commas, dropping empty items.
inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        if (end > start) out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

inline std::vector<NodeKind> parse_kind_list(std::string_view text) {
    std::vector<NodeKind> out;
    for (const auto& item : split_list(text)) out.push_back(node_kind_from_string(item));
    return out;
}

inline Direction parse_direction(std::string_view text) {
    if (text == "up") return Direction::Up;
    if (text == "down") return Direction::Down;
    if (text == "both" || text.empty()) return Direction::Both;
    throw Error(ErrorCode::InvalidArgument, "direction must be up, down or both");
}

inline CountMode parse_count_mode(std::string_view text) {
    if (text == "paths" || text == "distinct_paths") return CountMode::DistinctPaths;
    if (text == "pairs" || text == "distinct_endpoint_pairs") return CountMode::DistinctEndpointPairs;
    throw Error(ErrorCode::InvalidArgument, "count mode must be paths or pairs");
}

inline MatrixMode parse_matrix_mode(std::string_view text) {
    if (text == "products" || text == "unique_products") return MatrixMode::UniqueProducts;
    if (text == "versions" || text == "product_versions") return MatrixMode::ProductVersions;
    throw Error(ErrorCode::InvalidArgument, "matrix mode must be products or versions");
}

inline SeverityScoring parse_scoring(std::string_view text) {
    if (text == "max" || text == "max_per_product") return SeverityScoring::MaxPerProduct;
    if (text == "all" || text == "all_scores") return SeverityScoring::AllScores;
    throw Error(ErrorCode::InvalidArgument, "scoring must be max or all");
}

} // namespace bron

#pragma once

#include <istream>
#include <iterator>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bron/error.hpp"

namespace bron::ingest {

using json = nlohmann::json;

/// Reads a whole JSON document; syntax errors become ParseError carrying the
/// byte offset reported by the parser.
inline json read_json_document(std::istream& in, std::string_view what) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string(what) + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline const json& require_field(const json& object, std::string_view key, std::string_view context) {
    if (!object.is_object()) {
        throw Error(ErrorCode::SchemaError, std::string(context) + ": expected an object holding '" + std::string(key) + "'");
    }
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        throw Error(ErrorCode::SchemaError, std::string(context) + ": missing field '" + std::string(key) + "'");
    }
    return *it;
}

inline std::string require_string(const json& object, std::string_view key, std::string_view context) {
    const auto& value = require_field(object, key, context);
    if (!value.is_string()) {
        throw Error(ErrorCode::SchemaError, std::string(context) + ": field '" + std::string(key) + "' is not a string");
    }
    return value.get<std::string>();
}

inline std::string string_or(const json& object, std::string_view key, std::string fallback = {}) {
    if (!object.is_object()) return fallback;
    auto it = object.find(key);
    if (it == object.end() || !it->is_string()) return fallback;
    return it->get<std::string>();
}

inline bool bool_or(const json& object, std::string_view key, bool fallback) {
    if (!object.is_object()) return fallback;
    auto it = object.find(key);
    if (it == object.end() || !it->is_boolean()) return fallback;
    return it->get<bool>();
}

} // namespace bron::ingest

#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bron/error.hpp"

namespace bron {

inline std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// One CPE 2.3 attribute: the logical value ANY ("*"), NA ("-"), or a
/// concrete, fully unescaped, lowercase string.
class CpeAttribute {
public:
    enum class Type { Any, NA, Value };

    CpeAttribute() = default;

    static CpeAttribute any() { return CpeAttribute(); }
    static CpeAttribute na() {
        CpeAttribute a;
        a.type_ = Type::NA;
        return a;
    }
    static CpeAttribute value(std::string_view text) {
        if (text.empty()) throw Error(ErrorCode::EmptyField, "CPE attribute value must be non-empty");
        CpeAttribute a;
        a.type_ = Type::Value;
        a.text_ = ascii_lower(text);
        return a;
    }

    Type type() const { return type_; }
    bool is_any() const { return type_ == Type::Any; }
    bool is_na() const { return type_ == Type::NA; }
    bool is_value() const { return type_ == Type::Value; }
    /// Empty unless is_value().
    const std::string& text() const { return text_; }

    bool operator==(const CpeAttribute&) const = default;

private:
    Type type_ = Type::Any;
    std::string text_;
};

/// A parsed CPE 2.3 formatted-string name.
struct CpeName {
    enum Field : std::size_t {
        Part,
        Vendor,
        Product,
        Version,
        Update,
        Edition,
        Language,
        SwEdition,
        TargetSw,
        TargetHw,
        Other,
    };
    static constexpr std::size_t kFieldCount = 11;

    std::array<CpeAttribute, kFieldCount> fields;

    const CpeAttribute& operator[](Field f) const { return fields[f]; }
    CpeAttribute& operator[](Field f) { return fields[f]; }

    const CpeAttribute& part() const { return fields[Part]; }
    const CpeAttribute& vendor() const { return fields[Vendor]; }
    const CpeAttribute& product() const { return fields[Product]; }
    const CpeAttribute& version() const { return fields[Version]; }

    bool operator==(const CpeName&) const = default;
};

namespace detail {

// Splits on unescaped ':' and unescapes. Returns raw pieces flagged with
// whether any escape occurred (an escaped "\-" or "\*" is a value, not a
// logical attribute).
struct CpePiece {
    std::string text;
    bool escaped = false;
};

inline std::vector<CpePiece> split_cpe(std::string_view text) {
    std::vector<CpePiece> pieces(1);
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\\') {
            if (i + 1 >= text.size()) {
                throw Error(ErrorCode::BadEscape, "dangling backslash at end of '" + std::string(text) + "'");
            }
            pieces.back().text.push_back(text[++i]);
            pieces.back().escaped = true;
        } else if (c == ':') {
            pieces.emplace_back();
        } else {
            pieces.back().text.push_back(c);
        }
    }
    return pieces;
}

} // namespace detail

/// Parses a CPE 2.3 formatted string. URI bindings ("cpe:/...") are rejected.
inline CpeName parse_cpe23(std::string_view text) {
    if (text.rfind("cpe:/", 0) == 0) {
        throw Error(ErrorCode::Malformed, "URI-bound CPE names are not supported: '" + std::string(text) + "'");
    }
    const auto pieces = detail::split_cpe(text);
    if (pieces.size() != 2 + CpeName::kFieldCount) {
        throw Error(ErrorCode::Malformed, "expected 13 colon-delimited fields, got " + std::to_string(pieces.size()) +
                                              " in '" + std::string(text) + "'");
    }
    if (pieces[0].text != "cpe" || pieces[0].escaped || pieces[1].text != "2.3" || pieces[1].escaped) {
        throw Error(ErrorCode::Malformed, "missing 'cpe:2.3' prefix in '" + std::string(text) + "'");
    }
    CpeName name;
    for (std::size_t i = 0; i < CpeName::kFieldCount; ++i) {
        const auto& piece = pieces[i + 2];
        if (piece.text.empty()) {
            throw Error(ErrorCode::EmptyField, "field " + std::to_string(i + 3) + " is empty in '" + std::string(text) + "'");
        }
        if (!piece.escaped && piece.text == "*") {
            name.fields[i] = CpeAttribute::any();
        } else if (!piece.escaped && piece.text == "-") {
            name.fields[i] = CpeAttribute::na();
        } else {
            name.fields[i] = CpeAttribute::value(piece.text);
        }
    }
    const auto& part = name.part();
    if (part.is_value() && part.text() != "a" && part.text() != "o" && part.text() != "h") {
        throw Error(ErrorCode::Malformed, "part must be a, o or h in '" + std::string(text) + "'");
    }
    return name;
}

/// Canonical field text: "*", "-", or the value with \ * ? : escaped. A value
/// spelled exactly "-" is escaped so it cannot read back as NA.
inline std::string format_cpe_attribute(const CpeAttribute& attr) {
    if (attr.is_any()) return "*";
    if (attr.is_na()) return "-";
    if (attr.text() == "-") return "\\-";
    std::string out;
    out.reserve(attr.text().size());
    for (char c : attr.text()) {
        if (c == '\\' || c == '*' || c == '?' || c == ':') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

inline std::string serialize(const CpeName& name) {
    std::string out = "cpe:2.3";
    for (const auto& attr : name.fields) {
        out.push_back(':');
        out += format_cpe_attribute(attr);
    }
    return out;
}

/// parse + serialize; configuration node ids use this form.
inline std::string canonical_cpe(std::string_view text) { return serialize(parse_cpe23(text)); }

inline std::pair<std::string, std::string> vendor_product(const CpeName& name) {
    if (!name.vendor().is_value() || !name.product().is_value()) {
        throw Error(ErrorCode::WildcardVendorProduct, "vendor and product must be concrete in '" + serialize(name) + "'");
    }
    return {name.vendor().text(), name.product().text()};
}

} // namespace bron

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bron {

enum class ErrorCode {
    InvalidNode,
    DuplicateId,
    UnknownNode,
    UnknownEndpoint,
    IllegalLayerPair,
    SelfEdge,
    ConflictingEdge,
    Sealed,
    Malformed,
    BadEscape,
    EmptyField,
    WildcardVendorProduct,
    ParseError,
    SchemaError,
    ConflictingRecord,
    LimitZero,
    NoEntries,
    UnknownProduct,
    WrongKind,
    InvalidArgument,
    BindFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidNode: return "InvalidNode";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
        case ErrorCode::IllegalLayerPair: return "IllegalLayerPair";
        case ErrorCode::SelfEdge: return "SelfEdge";
        case ErrorCode::ConflictingEdge: return "ConflictingEdge";
        case ErrorCode::Sealed: return "Sealed";
        case ErrorCode::Malformed: return "Malformed";
        case ErrorCode::BadEscape: return "BadEscape";
        case ErrorCode::EmptyField: return "EmptyField";
        case ErrorCode::WildcardVendorProduct: return "WildcardVendorProduct";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ConflictingRecord: return "ConflictingRecord";
        case ErrorCode::LimitZero: return "LimitZero";
        case ErrorCode::NoEntries: return "NoEntries";
        case ErrorCode::UnknownProduct: return "UnknownProduct";
        case ErrorCode::WrongKind: return "WrongKind";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::BindFailure: return "BindFailure";
    }
    return "Unknown";
}

/// Every failure raised by the library. `code()` is machine readable; the
/// message names the offending id, field or location.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace bron

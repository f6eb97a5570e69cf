#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "bron/error.hpp"

namespace bron::ingest {

using XmlTree = boost::property_tree::ptree;

inline XmlTree read_xml_document(std::istream& in, std::string_view what) {
    XmlTree tree;
    try {
        boost::property_tree::read_xml(in, tree, boost::property_tree::xml_parser::trim_whitespace);
    } catch (const boost::property_tree::xml_parser_error& e) {
        throw Error(ErrorCode::ParseError, std::string(what) + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    return tree;
}

/// Element name without a namespace prefix ("capec:Attack_Pattern" -> "Attack_Pattern").
inline std::string_view local_name(std::string_view tag) {
    auto colon = tag.find(':');
    return colon == std::string_view::npos ? tag : tag.substr(colon + 1);
}

inline std::vector<const XmlTree*> xml_children(const XmlTree& node, std::string_view name) {
    std::vector<const XmlTree*> out;
    for (const auto& [tag, child] : node) {
        if (local_name(tag) == name) out.push_back(&child);
    }
    return out;
}

inline const XmlTree* xml_child(const XmlTree& node, std::string_view name) {
    for (const auto& [tag, child] : node) {
        if (local_name(tag) == name) return &child;
    }
    return nullptr;
}

inline std::string xml_attribute(const XmlTree& node, const std::string& name) {
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
        if (auto value = attrs->get_optional<std::string>(name)) return *value;
    }
    return {};
}

/// Concatenated character data of an element and its descendants.
inline std::string xml_text(const XmlTree& node) {
    std::string out = node.data();
    for (const auto& [tag, child] : node) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
        auto inner = xml_text(child);
        if (inner.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += inner;
    }
    return out;
}

} // namespace bron::ingest

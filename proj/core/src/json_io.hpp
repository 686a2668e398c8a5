#pragma once

#include "slgb/dataset.hpp"
#include "slgb/error.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace slgb::detail {

using json = nlohmann::ordered_json;

inline json schema_to_json(const std::vector<attribute_schema> &schema) {
    json out = json::array();
    for (const auto &attr : schema) {
        json a;
        a["name"] = attr.name;
        a["kind"] = attr.is_numeric() ? "numeric" : "nominal";
        if (attr.is_nominal()) {
            a["values"] = attr.values;
        } else {
            a["min"] = attr.min;
            a["max"] = attr.max;
        }
        out.push_back(std::move(a));
    }
    return out;
}

inline std::vector<attribute_schema> schema_from_json(const json &j) {
    std::vector<attribute_schema> schema;
    for (const auto &a : j) {
        attribute_schema attr;
        attr.name = a.at("name").get<std::string>();
        const auto kind = a.at("kind").get<std::string>();
        if (kind == "nominal") {
            attr.kind = attribute_kind::nominal;
            attr.values = a.at("values").get<std::vector<std::string>>();
        } else if (kind == "numeric") {
            attr.min = a.value("min", 0.0);
            attr.max = a.value("max", 0.0);
        } else {
            throw schema_error("unknown attribute kind '" + kind + "' in JSON");
        }
        schema.push_back(std::move(attr));
    }
    return schema;
}

inline json parse_document(std::string_view text, std::string_view expected_format, int max_version) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        throw error(std::string{ "invalid JSON document: " } + e.what());
    }
    if (!doc.is_object() || doc.value("format", std::string{}) != expected_format) {
        throw error("JSON document is not a '" + std::string{ expected_format } + "' document");
    }
    if (doc.value("version", 0) < 1 || doc.value("version", 0) > max_version) {
        throw error("unsupported '" + std::string{ expected_format } + "' version");
    }
    return doc;
}

}  // namespace slgb::detail

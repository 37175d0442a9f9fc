#pragma once

// Just-enough JSON Schema checker for the shipped output schemas: type,
// required, properties, items, enum, const, additionalProperties (boolean
// form) and $ref into #/$defs. Returns a list of problems, empty when the
// document conforms.

#include <string>
#include <vector>

#include <json.hpp>

namespace obsdet::testing {

namespace schema_detail {

using nlohmann::json;

inline bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline void check(const json& value, const json& schema, const json& root,
                  const std::string& where, std::vector<std::string>& problems) {
    if (schema.contains("$ref")) {
        std::string ref = schema["$ref"].get<std::string>();
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0) {
            problems.push_back(where + ": unsupported $ref '" + ref + "'");
            return;
        }
        std::string name = ref.substr(prefix.size());
        if (!root.contains("$defs") || !root["$defs"].contains(name)) {
            problems.push_back(where + ": unresolved $ref '" + ref + "'");
            return;
        }
        check(value, root["$defs"][name], root, where, problems);
        return;
    }

    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_array()) {
            for (const json& option : t) ok = ok || type_matches(value, option.get<std::string>());
        } else {
            ok = type_matches(value, t.get<std::string>());
        }
        if (!ok) {
            problems.push_back(where + ": expected type " + t.dump() + ", got " + value.dump());
            return;
        }
    }

    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& option : schema["enum"]) ok = ok || option == value;
        if (!ok) problems.push_back(where + ": " + value.dump() + " not in enum");
    }
    if (schema.contains("const") && schema["const"] != value) {
        problems.push_back(where + ": expected const " + schema["const"].dump());
    }

    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const json& key : schema["required"]) {
                if (!value.contains(key.get<std::string>())) {
                    problems.push_back(where + ": missing required key '" +
                                       key.get<std::string>() + "'");
                }
            }
        }
        const bool sealed = schema.contains("additionalProperties") &&
                            schema["additionalProperties"].is_boolean() &&
                            !schema["additionalProperties"].get<bool>();
        for (const auto& [key, child] : value.items()) {
            if (schema.contains("properties") && schema["properties"].contains(key)) {
                check(child, schema["properties"][key], root, where + "." + key, problems);
            } else if (sealed) {
                problems.push_back(where + ": unexpected key '" + key + "'");
            } else if (schema.contains("additionalProperties") &&
                       schema["additionalProperties"].is_object()) {
                check(child, schema["additionalProperties"], root, where + "." + key, problems);
            }
        }
    }

    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            check(value[i], schema["items"], root, where + "[" + std::to_string(i) + "]",
                  problems);
        }
    }
}

}  // namespace schema_detail

inline std::vector<std::string> schema_problems(const nlohmann::json& value,
                                                const nlohmann::json& schema) {
    std::vector<std::string> problems;
    schema_detail::check(value, schema, schema, "$", problems);
    return problems;
}

}  // namespace obsdet::testing

#include "wkam/schema.hpp"

#include <cmath>

#include "wkam/embedded_schemas.hpp"
#include "wkam/error.hpp"

namespace wkam::schema {

namespace {

using nlohmann::json;

bool type_matches(const std::string& type, const json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (type == "number") return v.is_number();
    if (type == "null") return v.is_null();
    return false;
}

void check(const json& schema, const json& doc, const std::string& ptr,
           std::vector<Violation>& out) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        if (!type_matches(type, doc)) {
            out.push_back({ptr, "expected " + type});
            return;
        }
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& e : schema["enum"])
            if (e == doc) hit = true;
        if (!hit) out.push_back({ptr, "value not in enum"});
    }
    if (doc.is_number()) {
        double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema["minimum"].get<double>())
            out.push_back({ptr, "below minimum"});
        if (schema.contains("maximum") && v > schema["maximum"].get<double>())
            out.push_back({ptr, "above maximum"});
        if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>())
            out.push_back({ptr, "must exceed exclusiveMinimum"});
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"]) {
                const std::string k = key.get<std::string>();
                if (!doc.contains(k))
                    out.push_back({ptr + "/" + k, "required key missing"});
            }
        const json props = schema.value("properties", json::object());
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (props.contains(it.key())) {
                check(props[it.key()], it.value(), ptr + "/" + it.key(), out);
            } else if (schema.contains("additionalProperties") &&
                       schema["additionalProperties"].is_boolean() &&
                       !schema["additionalProperties"].get<bool>()) {
                out.push_back({ptr + "/" + it.key(), "unknown key"});
            }
        }
    }
    if (doc.is_array()) {
        if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
            out.push_back({ptr, "too few items"});
        if (schema.contains("maxItems") && doc.size() > schema["maxItems"].get<std::size_t>())
            out.push_back({ptr, "too many items"});
        if (schema.contains("items")) {
            std::size_t i = 0;
            for (const auto& item : doc) {
                check(schema["items"], item, ptr + "/" + std::to_string(i), out);
                ++i;
            }
        }
    }
}

const json& parse_once(const char* text, json& cache) {
    if (cache.is_null()) cache = json::parse(text);
    return cache;
}

} // namespace

std::vector<Violation> validate(const nlohmann::json& schema, const nlohmann::json& doc) {
    std::vector<Violation> out;
    check(schema, doc, "", out);
    return out;
}

void enforce(const nlohmann::json& schema, const nlohmann::json& doc, const std::string& what) {
    auto v = validate(schema, doc);
    if (!v.empty())
        throw ConfigError(what + ": " + v.front().message, v.front().pointer);
}

#define WKAM_SCHEMA_ACCESSOR(fn, field)                    \
    const nlohmann::json& fn() {                           \
        static nlohmann::json cache;                       \
        return parse_once(embedded::field, cache);         \
    }

WKAM_SCHEMA_ACCESSOR(problem_config_schema, problem_config)
WKAM_SCHEMA_ACCESSOR(solve_report_schema, solve_report)
WKAM_SCHEMA_ACCESSOR(verification_report_schema, verification_report)
WKAM_SCHEMA_ACCESSOR(alpha_report_schema, alpha_report)
WKAM_SCHEMA_ACCESSOR(smooth_report_schema, smooth_report)
WKAM_SCHEMA_ACCESSOR(grid_function_schema, grid_function)

#undef WKAM_SCHEMA_ACCESSOR

} // namespace wkam::schema

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace wkam::schema {

struct Violation {
    std::string pointer; ///< JSON pointer to the offending element
    std::string message;
};

/// Validates `doc` against the JSON-Schema subset the shipped schemas use:
/// type, enum, required, properties, additionalProperties:false, items,
/// minItems/maxItems, minimum/maximum/exclusiveMinimum.
std::vector<Violation> validate(const nlohmann::json& schema, const nlohmann::json& doc);

/// Throws ConfigError (with the first violation's pointer) if invalid.
void enforce(const nlohmann::json& schema, const nlohmann::json& doc,
             const std::string& what);

/// Embedded copies of the shipped schema documents.
const nlohmann::json& problem_config_schema();
const nlohmann::json& solve_report_schema();
const nlohmann::json& verification_report_schema();
const nlohmann::json& alpha_report_schema();
const nlohmann::json& smooth_report_schema();
const nlohmann::json& grid_function_schema();

} // namespace wkam::schema

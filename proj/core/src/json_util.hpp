#pragma once

// Internal helpers shared by the JSON loaders. Not installed.

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "iar/error.hpp"
#include "iar/registry.hpp"
#include "iar/value.hpp"

namespace iar::detail {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text, const std::string& where);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Value wire form: bare string = categorical, bare number/bool as-is,
// [x,y,z] = vec3, {"num":..,"unit":..} = number with unit, {"text":..} = text.
Json value_to_json(const Value& v);
Value value_from_json(const Json& j, const std::string& where);

Json domain_to_json(const ValueDomain& d);
ValueDomain domain_from_json(const Json& j, const std::string& where);

const Json& require(const Json& j, const char* key, const std::string& where);
std::string require_string(const Json& j, const char* key, const std::string& where);
double require_number(const Json& j, const char* key, const std::string& where);

Json map_to_json(const std::map<std::string, double>& m);

}  // namespace iar::detail

#include "iar/registry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "iar/error.hpp"
#include "json_util.hpp"

namespace iar {

const char* to_string(Category c) noexcept {
  switch (c) {
    case Category::User: return "User";
    case Category::Setting: return "Setting";
    case Category::SUI: return "SUI";
  }
  return "?";
}

const char* to_string(Persistence p) noexcept {
  return p == Persistence::Persistent ? "Persistent" : "Transient";
}

const char* to_string(InputType t) noexcept {
  switch (t) {
    case InputType::Specified: return "Specified";
    case InputType::Sensed: return "Sensed";
    case InputType::Extracted: return "Extracted";
  }
  return "?";
}

Category category_from_string(std::string_view s) {
  if (s == "User") return Category::User;
  if (s == "Setting") return Category::Setting;
  if (s == "SUI") return Category::SUI;
  throw Error(ErrorKind::ParseError, "unknown category '" + std::string(s) + "'");
}

Persistence persistence_from_string(std::string_view s) {
  if (s == "Persistent") return Persistence::Persistent;
  if (s == "Transient") return Persistence::Transient;
  throw Error(ErrorKind::ParseError, "unknown persistence '" + std::string(s) + "'");
}

InputType input_type_from_string(std::string_view s) {
  if (s == "Specified") return InputType::Specified;
  if (s == "Sensed") return InputType::Sensed;
  if (s == "Extracted") return InputType::Extracted;
  throw Error(ErrorKind::ParseError, "unknown input type '" + std::string(s) + "'");
}

namespace {

constexpr std::array<std::string_view, 2> kUserSubcategories = {
    "Persistent User Profile",
    "Transient User State",
};

constexpr std::array<std::string_view, 8> kSettingSubcategories = {
    "Persistent Local Environment",
    "Transient Local Environment",
    "Immediate Environment",
    "Persistent Global Knowledge",
    "Transient Digital Setting",
    "Attendee Profile",
    "Attendee State",
    "Attendee-Setting Interplay",
};

constexpr std::array<std::string_view, 1> kSuiSubcategories = {
    "Setting-User Interplay",
};

}  // namespace

std::span<const std::string_view> subcategories_of(Category c) noexcept {
  switch (c) {
    case Category::User: return kUserSubcategories;
    case Category::Setting: return kSettingSubcategories;
    case Category::SUI: return kSuiSubcategories;
  }
  return {};
}

bool is_valid_subcategory(Category c, std::string_view label) noexcept {
  auto subs = subcategories_of(c);
  return std::find(subs.begin(), subs.end(), label) != subs.end();
}

void validate_component_path(std::string_view path) {
  if (path.empty()) {
    throw Error(ErrorKind::InvalidTaxonomyPath, "empty component path");
  }
  std::size_t segments = 0;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = std::min(path.find('.', start), path.size());
    if (end == start) {
      throw Error(ErrorKind::InvalidTaxonomyPath,
                  "empty segment in '" + std::string(path) + "'");
    }
    for (std::size_t i = start; i < end; ++i) {
      const char ch = path[i];
      const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
      if (!ok) {
        throw Error(ErrorKind::InvalidTaxonomyPath,
                    "invalid character '" + std::string(1, ch) + "' in '" +
                        std::string(path) + "'");
      }
    }
    ++segments;
    if (end == path.size()) break;
    start = end + 1;
  }
  if (segments < 2) {
    throw Error(ErrorKind::InvalidTaxonomyPath,
                "'" + std::string(path) + "' needs at least two segments");
  }
  category_of_path(path);
}

Category category_of_path(std::string_view path) {
  const std::string_view root = path.substr(0, path.find('.'));
  if (root == "user") return Category::User;
  if (root == "setting") return Category::Setting;
  if (root == "sui") return Category::SUI;
  throw Error(ErrorKind::InvalidTaxonomyPath,
              "path root '" + std::string(root) + "' must be user, setting, or sui");
}

void validate_domain(const ValueDomain& domain) {
  if (const auto* c = std::get_if<CategoricalDomain>(&domain)) {
    if (c->labels.empty()) {
      throw Error(ErrorKind::ParseError, "categorical domain has no labels");
    }
    std::set<std::string> seen(c->labels.begin(), c->labels.end());
    if (seen.size() != c->labels.size()) {
      throw Error(ErrorKind::ParseError, "categorical domain has duplicate labels");
    }
  } else if (const auto* n = std::get_if<NumericDomain>(&domain)) {
    if (!std::isfinite(n->lo) || !std::isfinite(n->hi) || n->lo > n->hi) {
      throw Error(ErrorKind::ParseError, "numeric domain bounds invalid");
    }
  }
}

bool admits(const ValueDomain& domain, const Value& value) {
  if (const auto* c = std::get_if<CategoricalDomain>(&domain)) {
    if (!value.is_categorical()) return false;
    const auto& label = value.as_categorical();
    return std::find(c->labels.begin(), c->labels.end(), label) != c->labels.end();
  }
  if (const auto* n = std::get_if<NumericDomain>(&domain)) {
    if (!value.is_number()) return false;
    const auto& num = value.as_number();
    return num.unit == n->unit && num.magnitude >= n->lo && num.magnitude <= n->hi;
  }
  if (std::holds_alternative<BooleanDomain>(domain)) {
    return value.kind() == ValueKind::Boolean;
  }
  if (std::holds_alternative<TextDomain>(domain)) {
    return value.kind() == ValueKind::Text;
  }
  return value.kind() == ValueKind::Vec3;
}

std::string describe(const ValueDomain& domain) {
  if (const auto* c = std::get_if<CategoricalDomain>(&domain)) {
    std::string out = "{";
    for (std::size_t i = 0; i < c->labels.size(); ++i) {
      if (i) out += ", ";
      out += c->labels[i];
    }
    return out + "}";
  }
  if (const auto* n = std::get_if<NumericDomain>(&domain)) {
    std::string out = "[" + format_double(n->lo) + ", " + format_double(n->hi) + "]";
    if (!n->unit.empty()) out += " " + n->unit;
    return out;
  }
  if (std::holds_alternative<BooleanDomain>(domain)) return "boolean";
  if (std::holds_alternative<TextDomain>(domain)) return "text";
  return "vec3";
}

void validate(const ComponentDescriptor& descriptor) {
  validate_component_path(descriptor.id);
  if (category_of_path(descriptor.id) != descriptor.category) {
    throw Error(ErrorKind::InvalidTaxonomyPath,
                descriptor.id + ": path root does not match category " +
                    to_string(descriptor.category));
  }
  if (!is_valid_subcategory(descriptor.category, descriptor.subcategory)) {
    throw Error(ErrorKind::InvalidTaxonomyPath,
                descriptor.id + ": subcategory '" + descriptor.subcategory +
                    "' does not belong to category " + to_string(descriptor.category));
  }
  // Persistent components are read back from storage, so their input type is
  // always Extracted.
  if (descriptor.persistence == Persistence::Persistent &&
      descriptor.input_type != InputType::Extracted) {
    throw Error(ErrorKind::PersistentNotExtracted,
                descriptor.id + ": persistent components must use Extracted input");
  }
  try {
    validate_domain(descriptor.domain);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, descriptor.id + ": " + e.what());
  }
}

void ComponentRegistry::register_component(ComponentDescriptor descriptor) {
  validate(descriptor);
  auto [it, inserted] = components_.try_emplace(descriptor.id, std::move(descriptor));
  if (!inserted) {
    throw Error(ErrorKind::DuplicateId, it->first + " already registered");
  }
}

const ComponentDescriptor* ComponentRegistry::find(const std::string& id) const noexcept {
  auto it = components_.find(id);
  return it == components_.end() ? nullptr : &it->second;
}

const ComponentDescriptor& ComponentRegistry::at(const std::string& id) const {
  if (const auto* d = find(id)) return *d;
  throw Error(ErrorKind::UnknownComponent, id + " not registered");
}

bool ComponentRegistry::contains(const std::string& id) const noexcept {
  return components_.count(id) != 0;
}

void ComponentRegistry::validate_value(const std::string& id, const Value& value) const {
  const auto& descriptor = at(id);
  if (!admits(descriptor.domain, value)) {
    throw Error(ErrorKind::ValueOutOfDomain,
                id + ": value '" + value.token() + "' not in domain " +
                    describe(descriptor.domain));
  }
}

// --- JSON I/O ---------------------------------------------------------------

namespace detail {

Json parse_json(const std::string& text, const std::string& where) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::ParseError, where + ": invalid JSON");
  }
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw Error(ErrorKind::IoError, "write failed for " + path.string());
  }
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::ParseError, where + ": missing '" + key + "'");
  }
  return *it;
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) {
    throw Error(ErrorKind::ParseError, where + "." + key + ": expected string");
  }
  return v.get<std::string>();
}

double require_number(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) {
    throw Error(ErrorKind::ParseError, where + "." + key + ": expected number");
  }
  return v.get<double>();
}

Json map_to_json(const std::map<std::string, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

Json value_to_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Categorical:
      return Json(v.as_categorical());
    case ValueKind::Number: {
      const auto& n = v.as_number();
      if (n.unit.empty()) return Json(n.magnitude);
      return Json{{"num", n.magnitude}, {"unit", n.unit}};
    }
    case ValueKind::Boolean:
      return Json(v.as_boolean());
    case ValueKind::Text:
      return Json{{"text", v.as_text()}};
    case ValueKind::Vec3: {
      const auto& vec = v.as_vec3();
      return Json::array({vec.x, vec.y, vec.z});
    }
  }
  return {};
}

Value value_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) return Value::categorical(j.get<std::string>());
  if (j.is_number()) return Value::number(j.get<double>());
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_array()) {
    if (j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
      throw Error(ErrorKind::ParseError, where + ": vec3 must be [x, y, z]");
    }
    return Value::vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  }
  if (j.is_object()) {
    if (j.contains("text")) return Value::text(j["text"].get<std::string>());
    if (j.contains("num")) {
      return Value::number(j["num"].get<double>(), j.value("unit", std::string{}));
    }
  }
  throw Error(ErrorKind::ParseError, where + ": unrecognized value form");
}

Json domain_to_json(const ValueDomain& d) {
  if (const auto* c = std::get_if<CategoricalDomain>(&d)) {
    return Json{{"labels", c->labels}};
  }
  if (const auto* n = std::get_if<NumericDomain>(&d)) {
    Json j{{"min", n->lo}, {"max", n->hi}};
    if (!n->unit.empty()) j["unit"] = n->unit;
    return j;
  }
  if (std::holds_alternative<BooleanDomain>(d)) return Json{{"kind", "boolean"}};
  if (std::holds_alternative<TextDomain>(d)) return Json{{"kind", "text"}};
  return Json{{"kind", "vec3"}};
}

ValueDomain domain_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::ParseError, where + ": domain must be an object");
  }
  if (j.contains("labels")) {
    CategoricalDomain c;
    for (const auto& label : j["labels"]) {
      if (!label.is_string()) {
        throw Error(ErrorKind::ParseError, where + ".labels: expected strings");
      }
      c.labels.push_back(label.get<std::string>());
    }
    return c;
  }
  if (j.contains("min") || j.contains("max")) {
    NumericDomain n;
    n.lo = require_number(j, "min", where);
    n.hi = require_number(j, "max", where);
    n.unit = j.value("unit", std::string{});
    return n;
  }
  const std::string kind = require_string(j, "kind", where);
  if (kind == "boolean") return BooleanDomain{};
  if (kind == "text") return TextDomain{};
  if (kind == "vec3") return Vec3Domain{};
  throw Error(ErrorKind::ParseError, where + ": unknown domain kind '" + kind + "'");
}

}  // namespace detail

ComponentRegistry parse_registry(const std::string& json_text) {
  using detail::Json;
  const Json doc = detail::parse_json(json_text, "registry");
  const Json& components = detail::require(doc, "components", "registry");
  if (!components.is_array()) {
    throw Error(ErrorKind::ParseError, "registry.components: expected array");
  }
  ComponentRegistry registry;
  std::size_t index = 0;
  for (const auto& c : components) {
    const std::string where = "registry.components[" + std::to_string(index++) + "]";
    ComponentDescriptor d;
    d.id = detail::require_string(c, "id", where);
    d.category = category_from_string(detail::require_string(c, "category", where));
    d.subcategory = detail::require_string(c, "subcategory", where);
    d.persistence = persistence_from_string(detail::require_string(c, "persistence", where));
    d.input_type = input_type_from_string(detail::require_string(c, "input_type", where));
    d.domain = detail::domain_from_json(detail::require(c, "domain", where), where + ".domain");
    registry.register_component(std::move(d));
  }
  return registry;
}

ComponentRegistry load_registry_file(const std::filesystem::path& path) {
  return parse_registry(detail::read_file(path));
}

std::string serialize_registry(const ComponentRegistry& registry) {
  using detail::Json;
  Json components = Json::array();
  for (const auto& [id, d] : registry.components()) {
    components.push_back(Json{
        {"id", d.id},
        {"category", to_string(d.category)},
        {"subcategory", d.subcategory},
        {"persistence", to_string(d.persistence)},
        {"input_type", to_string(d.input_type)},
        {"domain", detail::domain_to_json(d.domain)},
    });
  }
  Json doc{{"registry_version", 1}, {"components", std::move(components)}};
  return doc.dump(2) + "\n";
}

}  // namespace iar

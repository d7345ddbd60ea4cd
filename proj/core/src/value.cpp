#include "iar/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "iar/error.hpp"

namespace iar {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::InvalidTaxonomyPath: return "InvalidTaxonomyPath";
    case ErrorKind::PersistentNotExtracted: return "PersistentNotExtracted";
    case ErrorKind::UnknownComponent: return "UnknownComponent";
    case ErrorKind::ValueOutOfDomain: return "ValueOutOfDomain";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::GazeVertical: return "GazeVertical";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownDimension: return "UnknownDimension";
    case ErrorKind::ImpactOutOfRange: return "ImpactOutOfRange";
    case ErrorKind::DuplicatePrincipleId: return "DuplicatePrincipleId";
    case ErrorKind::InvalidInference: return "InvalidInference";
    case ErrorKind::MissingComponent: return "MissingComponent";
    case ErrorKind::UnknownEntity: return "UnknownEntity";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

Vec3 floor_projected(const Vec3& v) { return {v.x, 0.0, v.z}; }

const char* to_string(ValueKind kind) noexcept {
  switch (kind) {
    case ValueKind::Categorical: return "categorical";
    case ValueKind::Number: return "number";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Text: return "text";
    case ValueKind::Vec3: return "vec3";
  }
  return "unknown";
}

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::ParseError, std::string(what) + " must be finite");
  }
}

}  // namespace

Value Value::categorical(std::string label) {
  Value v;
  v.storage_ = Categorical{std::move(label)};
  return v;
}

Value Value::number(double magnitude, std::string unit) {
  require_finite(magnitude, "number magnitude");
  Value v;
  v.storage_ = Number{magnitude, std::move(unit)};
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.storage_ = b;
  return v;
}

Value Value::text(std::string content) {
  Value v;
  v.storage_ = Text{std::move(content)};
  return v;
}

Value Value::vec3(double x, double y, double z) {
  require_finite(x, "vec3.x");
  require_finite(y, "vec3.y");
  require_finite(z, "vec3.z");
  Value v;
  v.storage_ = Vec3{x, y, z};
  return v;
}

ValueKind Value::kind() const noexcept {
  return static_cast<ValueKind>(storage_.index());
}

namespace {

[[noreturn]] void kind_mismatch(ValueKind have, ValueKind want) {
  throw Error(ErrorKind::ParseError,
              std::string("value is ") + to_string(have) + ", expected " + to_string(want));
}

}  // namespace

const std::string& Value::as_categorical() const {
  if (auto* c = std::get_if<Categorical>(&storage_)) return c->label;
  kind_mismatch(kind(), ValueKind::Categorical);
}

const Number& Value::as_number() const {
  if (auto* n = std::get_if<Number>(&storage_)) return *n;
  kind_mismatch(kind(), ValueKind::Number);
}

bool Value::as_boolean() const {
  if (auto* b = std::get_if<bool>(&storage_)) return *b;
  kind_mismatch(kind(), ValueKind::Boolean);
}

const std::string& Value::as_text() const {
  if (auto* t = std::get_if<Text>(&storage_)) return t->content;
  kind_mismatch(kind(), ValueKind::Text);
}

const Vec3& Value::as_vec3() const {
  if (auto* v = std::get_if<Vec3>(&storage_)) return *v;
  kind_mismatch(kind(), ValueKind::Vec3);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  return std::string(buf, ptr);
}

std::string Value::token() const {
  switch (kind()) {
    case ValueKind::Categorical:
      return as_categorical();
    case ValueKind::Number: {
      const auto& n = as_number();
      return n.unit.empty() ? format_double(n.magnitude)
                            : format_double(n.magnitude) + " " + n.unit;
    }
    case ValueKind::Boolean:
      return as_boolean() ? "true" : "false";
    case ValueKind::Text:
      return as_text();
    case ValueKind::Vec3: {
      const auto& v = as_vec3();
      return "(" + format_double(v.x) + "," + format_double(v.y) + "," +
             format_double(v.z) + ")";
    }
  }
  return {};
}

}  // namespace iar

#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace iar {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
// Precondition: |v| > 0.
Vec3 normalized(const Vec3& v);
// Drops the vertical component (y := 0). Result is generally not unit length.
Vec3 floor_projected(const Vec3& v);

// A quantity with an optional unit tag ("m", "deg", ...). The unit takes part
// in equality: 1.0 m != 1.0 deg.
struct Number {
  double magnitude = 0.0;
  std::string unit;

  friend bool operator==(const Number&, const Number&) = default;
};

struct Categorical {
  std::string label;

  friend bool operator==(const Categorical&, const Categorical&) = default;
};

struct Text {
  std::string content;

  friend bool operator==(const Text&, const Text&) = default;
};

enum class ValueKind { Categorical, Number, Boolean, Text, Vec3 };

const char* to_string(ValueKind kind) noexcept;

// Tagged union carried by contexts, adaptations, and trace rows.
// Numeric magnitudes and vec3 components must be finite; the factory
// functions enforce that.
class Value {
 public:
  Value() : storage_(Categorical{}) {}

  static Value categorical(std::string label);
  static Value number(double magnitude, std::string unit = {});
  static Value boolean(bool v);
  static Value text(std::string content);
  static Value vec3(double x, double y, double z);

  ValueKind kind() const noexcept;

  bool is_categorical() const noexcept { return kind() == ValueKind::Categorical; }
  bool is_number() const noexcept { return kind() == ValueKind::Number; }

  const std::string& as_categorical() const;  // throws on kind mismatch
  const Number& as_number() const;
  bool as_boolean() const;
  const std::string& as_text() const;
  const Vec3& as_vec3() const;

  // Canonical token used for map keys and trace/plan serialization. Numbers
  // use shortest round-trip formatting, so equal doubles yield equal tokens.
  std::string token() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  std::variant<Categorical, Number, bool, Text, Vec3> storage_;
};

// Shortest round-trip decimal form of a double ("0.85", "12", "1e-09").
std::string format_double(double v);

}  // namespace iar

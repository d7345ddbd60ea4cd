#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "iar/taxonomy.hpp"
#include "iar/value.hpp"

namespace iar {

struct CategoricalDomain {
  std::vector<std::string> labels;  // non-empty, unique

  friend bool operator==(const CategoricalDomain&, const CategoricalDomain&) = default;
};

struct NumericDomain {
  double lo = 0.0;
  double hi = 0.0;  // inclusive; lo <= hi
  std::string unit;

  friend bool operator==(const NumericDomain&, const NumericDomain&) = default;
};

struct BooleanDomain {
  friend bool operator==(const BooleanDomain&, const BooleanDomain&) = default;
};

struct TextDomain {
  friend bool operator==(const TextDomain&, const TextDomain&) = default;
};

struct Vec3Domain {
  friend bool operator==(const Vec3Domain&, const Vec3Domain&) = default;
};

using ValueDomain =
    std::variant<CategoricalDomain, NumericDomain, BooleanDomain, TextDomain, Vec3Domain>;

bool admits(const ValueDomain& domain, const Value& value);
void validate_domain(const ValueDomain& domain);  // throws ParseError on empty/inverted
std::string describe(const ValueDomain& domain);

struct ComponentDescriptor {
  std::string id;  // dot-separated taxonomy path, e.g. "user.state.mobility"
  Category category = Category::User;
  std::string subcategory;
  Persistence persistence = Persistence::Transient;
  InputType input_type = InputType::Sensed;
  ValueDomain domain;

  friend bool operator==(const ComponentDescriptor&, const ComponentDescriptor&) = default;
};

// Checks the descriptor invariants: valid path whose root matches `category`,
// subcategory belonging to the category, persistent components extracted,
// well-formed domain.
void validate(const ComponentDescriptor& descriptor);

// The set of contextual components the engine knows about. Built once at
// startup, immutable afterwards; safe to share across threads.
class ComponentRegistry {
 public:
  void register_component(ComponentDescriptor descriptor);  // throws DuplicateId et al.

  const ComponentDescriptor* find(const std::string& id) const noexcept;
  const ComponentDescriptor& at(const std::string& id) const;  // throws UnknownComponent
  bool contains(const std::string& id) const noexcept;

  // Throws UnknownComponent / ValueOutOfDomain.
  void validate_value(const std::string& id, const Value& value) const;

  // Descriptors in id order.
  const std::map<std::string, ComponentDescriptor>& components() const noexcept {
    return components_;
  }
  std::size_t size() const noexcept { return components_.size(); }

  friend bool operator==(const ComponentRegistry&, const ComponentRegistry&) = default;

 private:
  std::map<std::string, ComponentDescriptor> components_;
};

// JSON document I/O (schema in docs/formats.md).
ComponentRegistry parse_registry(const std::string& json_text);
ComponentRegistry load_registry_file(const std::filesystem::path& path);
std::string serialize_registry(const ComponentRegistry& registry);

}  // namespace iar

#pragma once

#include <span>
#include <string>
#include <string_view>

namespace iar {

// Top-level context categories: the user in isolation, the world without the
// user, and the interplay between them.
enum class Category { User, Setting, SUI };

enum class Persistence { Persistent, Transient };

// How a component's value reaches the engine: typed in by the user, read off
// a sensor, or looked up in previously stored data.
enum class InputType { Specified, Sensed, Extracted };

const char* to_string(Category c) noexcept;
const char* to_string(Persistence p) noexcept;
const char* to_string(InputType t) noexcept;

Category category_from_string(std::string_view s);        // throws ParseError
Persistence persistence_from_string(std::string_view s);  // throws ParseError
InputType input_type_from_string(std::string_view s);     // throws ParseError

// Taxonomy leaves per category. Subcategory labels on descriptors must come
// from the owning category's list.
std::span<const std::string_view> subcategories_of(Category c) noexcept;
bool is_valid_subcategory(Category c, std::string_view label) noexcept;

// The category implied by a component path's first segment
// ("user.state.mobility" -> User).
Category category_of_path(std::string_view path);  // throws InvalidTaxonomyPath

// Validates a dot-separated component path: at least two non-empty segments,
// first segment one of user/setting/sui, segments limited to [a-z0-9_].
void validate_component_path(std::string_view path);  // throws InvalidTaxonomyPath

}  // namespace iar

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "iar/context.hpp"
#include "iar/registry.hpp"
#include "iar/value.hpp"

namespace iar {

struct EqualsPredicate {
  Value value;

  friend bool operator==(const EqualsPredicate&, const EqualsPredicate&) = default;
};

struct InSetPredicate {
  std::vector<Value> values;  // non-empty

  friend bool operator==(const InSetPredicate&, const InSetPredicate&) = default;
};

// Closed interval over a numeric component's magnitude.
struct InRangePredicate {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const InRangePredicate&, const InRangePredicate&) = default;
};

using Predicate = std::variant<EqualsPredicate, InSetPredicate, InRangePredicate>;

bool holds(const Predicate& predicate, const Value& value);

struct Constraint {
  std::string component;
  Predicate predicate;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// A scenario is the family of contexts satisfying every constraint
// (conjunctive semantics). The matching key for design principles.
struct ScenarioSpec {
  std::string id;
  std::vector<Constraint> constraints;  // at least one

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// At least one constraint, constrained components registered, range
// predicates only on numeric components. Throws InvalidScenario.
void validate(const ScenarioSpec& scenario, const ComponentRegistry& registry);

// True iff every constrained component is present in the context and its
// predicate holds. A component absent from the context fails the match; it is
// not an error (contexts may carry only the components currently detectable).
bool matches(const ScenarioSpec& scenario, const Context& context);

}  // namespace iar

#include "iar/scenario.hpp"

#include <algorithm>

#include "iar/error.hpp"

namespace iar {

bool holds(const Predicate& predicate, const Value& value) {
  if (const auto* eq = std::get_if<EqualsPredicate>(&predicate)) {
    return value == eq->value;
  }
  if (const auto* in = std::get_if<InSetPredicate>(&predicate)) {
    return std::find(in->values.begin(), in->values.end(), value) != in->values.end();
  }
  const auto& range = std::get<InRangePredicate>(predicate);
  if (!value.is_number()) return false;
  const double m = value.as_number().magnitude;
  return m >= range.lo && m <= range.hi;
}

void validate(const ScenarioSpec& scenario, const ComponentRegistry& registry) {
  if (scenario.constraints.empty()) {
    throw Error(ErrorKind::InvalidScenario,
                "scenario '" + scenario.id + "' has no constraints");
  }
  for (const auto& constraint : scenario.constraints) {
    const auto* descriptor = registry.find(constraint.component);
    if (descriptor == nullptr) {
      throw Error(ErrorKind::InvalidScenario,
                  "scenario '" + scenario.id + "' constrains unregistered component '" +
                      constraint.component + "'");
    }
    if (const auto* in = std::get_if<InSetPredicate>(&constraint.predicate)) {
      if (in->values.empty()) {
        throw Error(ErrorKind::InvalidScenario,
                    "scenario '" + scenario.id + "': empty in_set on '" +
                        constraint.component + "'");
      }
    }
    if (std::holds_alternative<InRangePredicate>(constraint.predicate) &&
        !std::holds_alternative<NumericDomain>(descriptor->domain)) {
      throw Error(ErrorKind::InvalidScenario,
                  "scenario '" + scenario.id + "': in_range on non-numeric component '" +
                      constraint.component + "'");
    }
  }
}

bool matches(const ScenarioSpec& scenario, const Context& context) {
  for (const auto& constraint : scenario.constraints) {
    const Value* value = context.find(constraint.component);
    if (value == nullptr || !holds(constraint.predicate, *value)) {
      return false;
    }
  }
  return true;
}

}  // namespace iar

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iar/context.hpp"
#include "iar/registry.hpp"
#include "iar/scenario.hpp"
#include "iar/value.hpp"

namespace iar::rules {

// Wildcard target: the adaptation applies to every entity of the current
// interface state. Expanded by the optimizer.
inline constexpr const char* kAllEntities = "*";

// Adjustable design dimensions and their value domains. A rulepack carries
// its own registry; study_dimensions() is the bundled default.
class DimensionRegistry {
 public:
  void register_dimension(std::string name, ValueDomain domain);
  const ValueDomain* find(const std::string& name) const noexcept;
  void validate_value(const std::string& dimension, const Value& value) const;
  const std::map<std::string, ValueDomain>& dimensions() const noexcept { return dims_; }

  friend bool operator==(const DimensionRegistry&, const DimensionRegistry&) = default;

 private:
  std::map<std::string, ValueDomain> dims_;
};

// visibility / frame_of_reference / position_sector / scale / opacity with
// the study value domains (scale 0.25..1.5, opacity 0.15..1.0).
DimensionRegistry study_dimensions();

// One dimension-value assignment on a set of target entities.
struct Adaptation {
  std::string dimension;
  Value value;
  std::vector<std::string> targets;  // non-empty; may contain kAllEntities

  friend bool operator==(const Adaptation&, const Adaptation&) = default;
};

bool targets_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Same dimension, overlapping targets, different values.
bool conflicting(const Adaptation& a, const Adaptation& b);

enum class SourceKind { Rule, Personalized, Universal };

const char* to_string(SourceKind kind) noexcept;

struct Source {
  SourceKind kind = SourceKind::Rule;
  std::string principle_id;  // set when kind == Rule

  static Source rule(std::string principle_id) {
    return {SourceKind::Rule, std::move(principle_id)};
  }
  static Source personalized() { return {SourceKind::Personalized, {}}; }
  static Source universal() { return {SourceKind::Universal, {}}; }

  std::string describe() const;

  friend bool operator==(const Source&, const Source&) = default;
};

// An atomic bundle of adaptations applied jointly, scored by its estimated
// impact on interface effectiveness (signed, in [-1, 1]).
struct Inference {
  std::vector<Adaptation> adaptations;  // non-empty, internally conflict-free
  double impact = 0.0;
  Source source;

  friend bool operator==(const Inference&, const Inference&) = default;
};

struct DesignPrinciple {
  std::string id;
  ScenarioSpec scenario;
  std::vector<Inference> inferences;  // non-empty, all sourced to this principle
  std::string notes;  // provenance of the impact weights

  friend bool operator==(const DesignPrinciple&, const DesignPrinciple&) = default;
};

struct RuleBase {
  std::string name;
  DimensionRegistry dimensions;
  std::vector<DesignPrinciple> principles;  // unique ids

  friend bool operator==(const RuleBase&, const RuleBase&) = default;
};

// Full validation of an inference against a dimension registry: non-empty
// bundle, known dimensions, in-domain values, non-empty targets, impact in
// [-1, 1], no internal conflicts. `where` prefixes error messages.
void validate(const Inference& inference, const DimensionRegistry& dims,
              const std::string& where);

// Rulepack JSON I/O (schema in docs/formats.md). Any invariant violation
// rejects the whole pack with a path-precise error.
RuleBase parse_rulepack(const std::string& json_text, const ComponentRegistry& registry);
RuleBase load_rulepack_file(const std::filesystem::path& path,
                            const ComponentRegistry& registry);
std::string serialize_rulepack(const RuleBase& rulebase);

// Principles whose scenario matches the context, ordered by principle id.
std::vector<const DesignPrinciple*> applicable(const RuleBase& rulebase,
                                               const Context& context);

// Concatenated inferences of all applicable principles. Duplicates are kept;
// consolidation is the adaptation unit's job.
std::vector<Inference> infer_rules(const RuleBase& rulebase, const Context& context);

// --- App roles ---------------------------------------------------------------

// An app's relation to the user's current task.
enum class AppRole { Irrelevant, Assistive, Primary };

const char* to_string(AppRole role) noexcept;

// First matching rule wins; apps with no matching rule are Irrelevant.
// An empty condition list means "any value".
struct RoleRule {
  std::string app;
  AppRole role = AppRole::Irrelevant;
  std::vector<std::string> objectives;
  std::vector<std::string> mobilities;
  std::vector<std::string> confinements;

  friend bool operator==(const RoleRule&, const RoleRule&) = default;
};

struct RoleTable {
  std::vector<std::string> apps;
  std::vector<RoleRule> rules;

  friend bool operator==(const RoleTable&, const RoleTable&) = default;
};

// Derives one `sui.app_role.<app>` upsert per app from the objective,
// mobility, and confinement components. Throws MissingComponent when any of
// the three is absent from the context.
std::vector<std::pair<std::string, Value>> derive_app_roles(const Context& context,
                                                            const RoleTable& table);

// Bundled library-study tables: the five apps, their role rules, and the
// contextual components they depend on.
RoleTable study_role_table();
ComponentRegistry study_registry();

// Study component ids.
inline constexpr const char* kObjectiveComponent = "user.state.rw_objective";
inline constexpr const char* kMobilityComponent = "user.state.mobility";
inline constexpr const char* kConfinementComponent = "setting.env.confinement";
inline constexpr const char* kAppRolePrefix = "sui.app_role.";

std::string app_role_component(const std::string& app);

}  // namespace iar::rules

#include "iar/rules.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "iar/error.hpp"
#include "json_util.hpp"

namespace iar::rules {

void DimensionRegistry::register_dimension(std::string name, ValueDomain domain) {
  validate_domain(domain);
  auto [it, inserted] = dims_.try_emplace(std::move(name), std::move(domain));
  if (!inserted) {
    throw Error(ErrorKind::DuplicateId, "dimension '" + it->first + "' already registered");
  }
}

const ValueDomain* DimensionRegistry::find(const std::string& name) const noexcept {
  auto it = dims_.find(name);
  return it == dims_.end() ? nullptr : &it->second;
}

void DimensionRegistry::validate_value(const std::string& dimension, const Value& value) const {
  const auto* domain = find(dimension);
  if (domain == nullptr) {
    throw Error(ErrorKind::UnknownDimension, "dimension '" + dimension + "' not registered");
  }
  if (!admits(*domain, value)) {
    throw Error(ErrorKind::ValueOutOfDomain,
                dimension + ": value '" + value.token() + "' not in domain " +
                    describe(*domain));
  }
}

DimensionRegistry study_dimensions() {
  DimensionRegistry dims;
  dims.register_dimension("visibility", CategoricalDomain{{"Visible", "Minimized"}});
  dims.register_dimension("frame_of_reference",
                          CategoricalDomain{{"HeadFixed", "BodyFixed", "WorldFixed"}});
  dims.register_dimension(
      "position_sector",
      CategoricalDomain{{"TopLeft", "TopCenter", "TopRight", "LeftCenter", "Center",
                         "RightCenter", "BottomLeft", "BottomCenter", "BottomRight",
                         "FarLeft", "FarRight"}});
  dims.register_dimension("scale", NumericDomain{0.25, 1.5, {}});
  dims.register_dimension("opacity", NumericDomain{0.15, 1.0, {}});
  return dims;
}

bool targets_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const bool a_all = std::find(a.begin(), a.end(), kAllEntities) != a.end();
  const bool b_all = std::find(b.begin(), b.end(), kAllEntities) != b.end();
  if (a_all || b_all) return !a.empty() && !b.empty();
  for (const auto& t : a) {
    if (std::find(b.begin(), b.end(), t) != b.end()) return true;
  }
  return false;
}

bool conflicting(const Adaptation& a, const Adaptation& b) {
  return a.dimension == b.dimension && a.value != b.value &&
         targets_overlap(a.targets, b.targets);
}

const char* to_string(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::Rule: return "Rule";
    case SourceKind::Personalized: return "Personalized";
    case SourceKind::Universal: return "Universal";
  }
  return "?";
}

std::string Source::describe() const {
  if (kind == SourceKind::Rule) return "Rule(" + principle_id + ")";
  return to_string(kind);
}

void validate(const Inference& inference, const DimensionRegistry& dims,
              const std::string& where) {
  if (inference.adaptations.empty()) {
    throw Error(ErrorKind::InvalidInference, where + ": empty adaptation bundle");
  }
  if (!std::isfinite(inference.impact) || inference.impact < -1.0 || inference.impact > 1.0) {
    throw Error(ErrorKind::ImpactOutOfRange,
                where + ": impact " + format_double(inference.impact) +
                    " outside [-1, 1]");
  }
  for (std::size_t i = 0; i < inference.adaptations.size(); ++i) {
    const auto& adaptation = inference.adaptations[i];
    const std::string at = where + ".adaptations[" + std::to_string(i) + "]";
    if (adaptation.targets.empty()) {
      throw Error(ErrorKind::InvalidInference, at + ": no targets");
    }
    try {
      dims.validate_value(adaptation.dimension, adaptation.value);
    } catch (const Error& e) {
      throw Error(e.kind(), at + ": " + e.what());
    }
  }
  // The bundle is atomic, so it must not disagree with itself.
  for (std::size_t i = 0; i < inference.adaptations.size(); ++i) {
    for (std::size_t j = i + 1; j < inference.adaptations.size(); ++j) {
      if (conflicting(inference.adaptations[i], inference.adaptations[j])) {
        throw Error(ErrorKind::InvalidInference,
                    where + ": adaptations " + std::to_string(i) + " and " +
                        std::to_string(j) + " conflict within one bundle");
      }
    }
  }
}

// --- Rulepack JSON -----------------------------------------------------------

namespace {

using detail::Json;

Predicate predicate_from_json(const Json& c, const std::string& where) {
  if (c.contains("equals")) {
    return EqualsPredicate{detail::value_from_json(c["equals"], where + ".equals")};
  }
  if (c.contains("in_set")) {
    const Json& arr = c["in_set"];
    if (!arr.is_array() || arr.empty()) {
      throw Error(ErrorKind::ParseError, where + ".in_set: expected non-empty array");
    }
    InSetPredicate p;
    for (const auto& v : arr) {
      p.values.push_back(detail::value_from_json(v, where + ".in_set"));
    }
    return p;
  }
  if (c.contains("in_range")) {
    const Json& arr = c["in_range"];
    if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number()) {
      throw Error(ErrorKind::ParseError, where + ".in_range: expected [lo, hi]");
    }
    return InRangePredicate{arr[0].get<double>(), arr[1].get<double>()};
  }
  throw Error(ErrorKind::ParseError,
              where + ": constraint needs one of equals / in_set / in_range");
}

Json predicate_to_json(const Predicate& p) {
  Json j;
  if (const auto* eq = std::get_if<EqualsPredicate>(&p)) {
    j["equals"] = detail::value_to_json(eq->value);
  } else if (const auto* in = std::get_if<InSetPredicate>(&p)) {
    Json arr = Json::array();
    for (const auto& v : in->values) arr.push_back(detail::value_to_json(v));
    j["in_set"] = std::move(arr);
  } else {
    const auto& range = std::get<InRangePredicate>(p);
    j["in_range"] = Json::array({range.lo, range.hi});
  }
  return j;
}

ScenarioSpec scenario_from_json(const Json& s, const std::string& where) {
  ScenarioSpec scenario;
  scenario.id = detail::require_string(s, "id", where);
  const Json& constraints = detail::require(s, "constraints", where);
  if (!constraints.is_array()) {
    throw Error(ErrorKind::ParseError, where + ".constraints: expected array");
  }
  std::size_t index = 0;
  for (const auto& c : constraints) {
    const std::string at = where + ".constraints[" + std::to_string(index++) + "]";
    Constraint constraint;
    constraint.component = detail::require_string(c, "component", at);
    constraint.predicate = predicate_from_json(c, at);
    scenario.constraints.push_back(std::move(constraint));
  }
  return scenario;
}

Json scenario_to_json(const ScenarioSpec& scenario) {
  Json constraints = Json::array();
  for (const auto& c : scenario.constraints) {
    Json j = predicate_to_json(c.predicate);
    Json out{{"component", c.component}};
    out.update(j);
    constraints.push_back(std::move(out));
  }
  return Json{{"id", scenario.id}, {"constraints", std::move(constraints)}};
}

Adaptation adaptation_from_json(const Json& a, const std::string& where) {
  Adaptation adaptation;
  adaptation.dimension = detail::require_string(a, "dimension", where);
  adaptation.value = detail::value_from_json(detail::require(a, "value", where), where + ".value");
  const Json& targets = detail::require(a, "targets", where);
  if (!targets.is_array()) {
    throw Error(ErrorKind::ParseError, where + ".targets: expected array");
  }
  for (const auto& t : targets) {
    if (!t.is_string()) {
      throw Error(ErrorKind::ParseError, where + ".targets: expected strings");
    }
    adaptation.targets.push_back(t.get<std::string>());
  }
  return adaptation;
}

Json adaptation_to_json(const Adaptation& a) {
  return Json{{"dimension", a.dimension},
              {"value", detail::value_to_json(a.value)},
              {"targets", a.targets}};
}

}  // namespace

RuleBase parse_rulepack(const std::string& json_text, const ComponentRegistry& registry) {
  const Json doc = detail::parse_json(json_text, "rulepack");
  const Json& version = detail::require(doc, "rulepack_version", "rulepack");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw Error(ErrorKind::ParseError, "rulepack: unsupported rulepack_version");
  }

  RuleBase rulebase;
  rulebase.name = doc.value("name", std::string{});

  const Json& dims = detail::require(doc, "dimensions", "rulepack");
  if (!dims.is_object()) {
    throw Error(ErrorKind::ParseError, "rulepack.dimensions: expected object");
  }
  for (const auto& [name, domain] : dims.items()) {
    rulebase.dimensions.register_dimension(
        name, detail::domain_from_json(domain, "rulepack.dimensions." + name));
  }

  const Json& principles = detail::require(doc, "principles", "rulepack");
  if (!principles.is_array()) {
    throw Error(ErrorKind::ParseError, "rulepack.principles: expected array");
  }
  std::set<std::string> seen_ids;
  std::size_t index = 0;
  for (const auto& p : principles) {
    const std::string where = "rulepack.principles[" + std::to_string(index++) + "]";
    DesignPrinciple principle;
    principle.id = detail::require_string(p, "id", where);
    if (!seen_ids.insert(principle.id).second) {
      throw Error(ErrorKind::DuplicatePrincipleId,
                  where + ": id '" + principle.id + "' already used");
    }
    principle.notes = p.value("notes", std::string{});
    principle.scenario = scenario_from_json(detail::require(p, "scenario", where),
                                            where + ".scenario");
    try {
      iar::validate(principle.scenario, registry);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ".scenario: " + e.what());
    }

    const Json& inferences = detail::require(p, "inferences", where);
    if (!inferences.is_array() || inferences.empty()) {
      throw Error(ErrorKind::ParseError, where + ".inferences: expected non-empty array");
    }
    std::size_t inference_index = 0;
    for (const auto& i : inferences) {
      const std::string at = where + ".inferences[" + std::to_string(inference_index++) + "]";
      Inference inference;
      inference.impact = detail::require_number(i, "impact", at);
      inference.source = Source::rule(principle.id);
      const Json& adaptations = detail::require(i, "adaptations", at);
      if (!adaptations.is_array()) {
        throw Error(ErrorKind::ParseError, at + ".adaptations: expected array");
      }
      std::size_t adaptation_index = 0;
      for (const auto& a : adaptations) {
        inference.adaptations.push_back(adaptation_from_json(
            a, at + ".adaptations[" + std::to_string(adaptation_index++) + "]"));
      }
      validate(inference, rulebase.dimensions, at);
      principle.inferences.push_back(std::move(inference));
    }
    rulebase.principles.push_back(std::move(principle));
  }
  return rulebase;
}

RuleBase load_rulepack_file(const std::filesystem::path& path,
                            const ComponentRegistry& registry) {
  return parse_rulepack(detail::read_file(path), registry);
}

std::string serialize_rulepack(const RuleBase& rulebase) {
  Json dims = Json::object();
  for (const auto& [name, domain] : rulebase.dimensions.dimensions()) {
    dims[name] = detail::domain_to_json(domain);
  }
  Json principles = Json::array();
  for (const auto& p : rulebase.principles) {
    Json inferences = Json::array();
    for (const auto& i : p.inferences) {
      Json adaptations = Json::array();
      for (const auto& a : i.adaptations) adaptations.push_back(adaptation_to_json(a));
      inferences.push_back(Json{{"impact", i.impact}, {"adaptations", std::move(adaptations)}});
    }
    Json principle{{"id", p.id}};
    if (!p.notes.empty()) principle["notes"] = p.notes;
    principle["scenario"] = scenario_to_json(p.scenario);
    principle["inferences"] = std::move(inferences);
    principles.push_back(std::move(principle));
  }
  Json doc{{"rulepack_version", 1},
           {"name", rulebase.name},
           {"dimensions", std::move(dims)},
           {"principles", std::move(principles)}};
  return doc.dump(2) + "\n";
}

std::vector<const DesignPrinciple*> applicable(const RuleBase& rulebase,
                                               const Context& context) {
  std::vector<const DesignPrinciple*> out;
  for (const auto& principle : rulebase.principles) {
    if (matches(principle.scenario, context)) {
      out.push_back(&principle);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const DesignPrinciple* a, const DesignPrinciple* b) { return a->id < b->id; });
  return out;
}

std::vector<Inference> infer_rules(const RuleBase& rulebase, const Context& context) {
  std::vector<Inference> out;
  for (const auto* principle : applicable(rulebase, context)) {
    out.insert(out.end(), principle->inferences.begin(), principle->inferences.end());
  }
  return out;
}

// --- App roles ---------------------------------------------------------------

const char* to_string(AppRole role) noexcept {
  switch (role) {
    case AppRole::Irrelevant: return "Irrelevant";
    case AppRole::Assistive: return "Assistive";
    case AppRole::Primary: return "Primary";
  }
  return "?";
}

std::string app_role_component(const std::string& app) {
  std::string suffix;
  for (char ch : app) {
    suffix += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return kAppRolePrefix + suffix;
}

namespace {

const std::string& require_label(const Context& context, const char* component) {
  const Value* v = context.find(component);
  if (v == nullptr) {
    throw Error(ErrorKind::MissingComponent,
                std::string(component) + " absent from context");
  }
  return v->as_categorical();
}

bool any_or_contains(const std::vector<std::string>& allowed, const std::string& label) {
  return allowed.empty() ||
         std::find(allowed.begin(), allowed.end(), label) != allowed.end();
}

}  // namespace

std::vector<std::pair<std::string, Value>> derive_app_roles(const Context& context,
                                                            const RoleTable& table) {
  const std::string& objective = require_label(context, kObjectiveComponent);
  const std::string& mobility = require_label(context, kMobilityComponent);
  const std::string& confinement = require_label(context, kConfinementComponent);

  std::vector<std::pair<std::string, Value>> upserts;
  upserts.reserve(table.apps.size());
  for (const auto& app : table.apps) {
    AppRole role = AppRole::Irrelevant;
    for (const auto& rule : table.rules) {
      if (rule.app != app) continue;
      if (any_or_contains(rule.objectives, objective) &&
          any_or_contains(rule.mobilities, mobility) &&
          any_or_contains(rule.confinements, confinement)) {
        role = rule.role;
        break;
      }
    }
    upserts.emplace_back(app_role_component(app), Value::categorical(to_string(role)));
  }
  return upserts;
}

RoleTable study_role_table() {
  RoleTable table;
  table.apps = {"Map", "Book1", "Book2", "Messaging", "Stock"};
  // Stock is the virtual task throughout; the other apps assist exactly the
  // objective they serve. The map only helps while navigating open space.
  table.rules = {
      {"Stock", AppRole::Primary, {}, {}, {}},
      {"Book1", AppRole::Assistive, {"LocateBook1"}, {}, {}},
      {"Book2", AppRole::Assistive, {"LocateBook2"}, {}, {}},
      {"Messaging", AppRole::Assistive, {"LocateFriend"}, {}, {}},
      {"Map",
       AppRole::Assistive,
       {"LocateBook1", "LocateBook2", "LocateFriend"},
       {"Mobile"},
       {"Unconfined"}},
  };
  return table;
}

ComponentRegistry study_registry() {
  ComponentRegistry registry;
  registry.register_component({kObjectiveComponent, Category::User, "Transient User State",
                               Persistence::Transient, InputType::Specified,
                               CategoricalDomain{{"LocateBook1", "LocateBook2",
                                                  "LocateFriend", "Read"}}});
  registry.register_component({kMobilityComponent, Category::User, "Transient User State",
                               Persistence::Transient, InputType::Sensed,
                               CategoricalDomain{{"Mobile", "Stationary"}}});
  registry.register_component({kConfinementComponent, Category::Setting,
                               "Immediate Environment", Persistence::Transient,
                               InputType::Sensed,
                               CategoricalDomain{{"Confined", "Unconfined"}}});
  const CategoricalDomain roles{{"Irrelevant", "Assistive", "Primary"}};
  for (const auto& app : study_role_table().apps) {
    registry.register_component({app_role_component(app), Category::SUI,
                                 "Setting-User Interplay", Persistence::Transient,
                                 InputType::Extracted, roles});
  }
  return registry;
}

}  // namespace iar::rules

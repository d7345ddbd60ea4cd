#include "iar/learner.hpp"

#include <algorithm>
#include <cmath>

#include "iar/error.hpp"
#include "json_util.hpp"

namespace iar::learner {

void validate(const LearnerConfig& config) {
  const bool ok = config.alpha > 0.0 && config.alpha <= 1.0 && config.smoothing_k >= 0.0 &&
                  config.numeric_bin_width > 0.0;
  if (!ok) {
    throw Error(ErrorKind::ConfigError, "learner config out of range");
  }
}

Value quantize(const Value& value, const LearnerConfig& config) {
  if (!value.is_number()) return value;
  const auto& n = value.as_number();
  double binned =
      std::llround(n.magnitude / config.numeric_bin_width) * config.numeric_bin_width;
  // Snap to a 9-decimal grid so equal bins compare equal as doubles
  // (17 * 0.05 would otherwise differ from the literal 0.85).
  binned = std::round(binned * 1e9) / 1e9;
  return Value::number(binned, n.unit);
}

std::string ContextSignature::key() const {
  std::string out;
  for (const auto& [component, token] : parts) {
    if (!out.empty()) out += "|";
    out += component + "=" + token;
  }
  return out;
}

ContextSignature signature(const Context& context, const LearnerConfig& config) {
  ContextSignature sig;
  std::vector<std::string> components = config.signature_components;
  std::sort(components.begin(), components.end());
  for (const auto& component : components) {
    if (const Value* v = context.find(component)) {
      sig.parts.emplace_back(component, quantize(*v, config).token());
    }
  }
  return sig;
}

namespace {

std::string adaptation_key(const rules::Adaptation& a) {
  // Single concrete target by construction.
  return a.dimension + "=" + a.value.token() + "@" + a.targets.front();
}

// Flattens a plan or a manual list into one concrete (dimension, target,
// value) unit per target, quantized for stable keying.
struct AdaptationUnit {
  rules::Adaptation adaptation;  // exactly one target
};

void append_units(const rules::Adaptation& a, const LearnerConfig& config,
                  std::vector<AdaptationUnit>& out) {
  for (const auto& target : a.targets) {
    out.push_back({{a.dimension, quantize(a.value, config), {target}}});
  }
}

}  // namespace

void DimensionEstimator::update(const std::string& signature_key,
                                const rules::Adaptation& adaptation, double reward,
                                double alpha) {
  auto& slot = by_signature[signature_key][adaptation_key(adaptation)];
  if (slot.count == 0) {
    slot.adaptation = adaptation;
  }
  slot.ema = (1.0 - alpha) * slot.ema + alpha * reward;
  slot.count += 1;
}

void observe(PersonalModel& model, const FeedbackEvent& event, const LearnerConfig& config) {
  const std::string sig = signature(event.context, config).key();

  std::vector<AdaptationUnit> automatic;
  for (const auto& candidate : event.automatic.selected) {
    for (const auto& adaptation : candidate.adaptations) {
      append_units(adaptation, config, automatic);
    }
  }
  std::vector<AdaptationUnit> manual;
  for (const auto& adaptation : event.manual) {
    append_units(adaptation, config, manual);
  }

  const double kept_reward = 1.0;
  const double overridden_reward = config.invert_feedback_polarity ? 1.0 : -1.0;
  const double manual_reward = config.invert_feedback_polarity ? -1.0 : 1.0;

  for (const auto& unit : automatic) {
    const auto& a = unit.adaptation;
    const bool overridden = std::any_of(manual.begin(), manual.end(), [&](const AdaptationUnit& m) {
      return m.adaptation.dimension == a.dimension &&
             m.adaptation.targets.front() == a.targets.front() &&
             m.adaptation.value != a.value;
    });
    model.estimators[a.dimension].update(sig, a, overridden ? overridden_reward : kept_reward,
                                         config.alpha);
  }
  for (const auto& unit : manual) {
    const auto& a = unit.adaptation;
    model.estimators[a.dimension].update(sig, a, manual_reward, config.alpha);
  }
}

std::vector<rules::Inference> infer_personal(const PersonalModel& model,
                                             const Context& context,
                                             const LearnerConfig& config) {
  const std::string sig = signature(context, config).key();
  std::vector<rules::Inference> out;
  for (const auto& [dimension, estimator] : model.estimators) {
    auto it = estimator.by_signature.find(sig);
    if (it == estimator.by_signature.end()) continue;
    for (const auto& [key, estimate] : it->second) {
      if (estimate.count < config.min_support) continue;
      const double n = static_cast<double>(estimate.count);
      rules::Inference inference;
      inference.adaptations = {estimate.adaptation};
      inference.impact = estimate.ema * n / (n + config.smoothing_k);
      inference.source = rules::Source::personalized();
      out.push_back(std::move(inference));
    }
  }
  return out;
}

// --- Checkpoint I/O ----------------------------------------------------------

std::string serialize_model(const PersonalModel& model) {
  using detail::Json;
  Json dimensions = Json::object();
  for (const auto& [dimension, estimator] : model.estimators) {
    Json signatures = Json::object();
    for (const auto& [sig, slots] : estimator.by_signature) {
      Json entries = Json::array();
      for (const auto& [key, estimate] : slots) {
        entries.push_back(Json{
            {"dimension", estimate.adaptation.dimension},
            {"value", detail::value_to_json(estimate.adaptation.value)},
            {"target", estimate.adaptation.targets.front()},
            {"ema", estimate.ema},
            {"count", estimate.count},
        });
      }
      signatures[sig] = std::move(entries);
    }
    dimensions[dimension] = std::move(signatures);
  }
  Json doc{{"model_version", 1}, {"dimensions", std::move(dimensions)}};
  return doc.dump(2) + "\n";
}

PersonalModel parse_model(const std::string& json_text) {
  using detail::Json;
  const Json doc = detail::parse_json(json_text, "model");
  const Json& version = detail::require(doc, "model_version", "model");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw Error(ErrorKind::ParseError, "model: unsupported model_version");
  }
  PersonalModel model;
  const Json& dimensions = detail::require(doc, "dimensions", "model");
  for (const auto& [dimension, signatures] : dimensions.items()) {
    DimensionEstimator estimator;
    for (const auto& [sig, entries] : signatures.items()) {
      for (const auto& e : entries) {
        const std::string where = "model." + dimension + "." + sig;
        Estimate estimate;
        estimate.adaptation.dimension = detail::require_string(e, "dimension", where);
        estimate.adaptation.value =
            detail::value_from_json(detail::require(e, "value", where), where);
        estimate.adaptation.targets = {detail::require_string(e, "target", where)};
        estimate.ema = detail::require_number(e, "ema", where);
        estimate.count = static_cast<std::uint64_t>(detail::require_number(e, "count", where));
        estimator.by_signature[sig][adaptation_key(estimate.adaptation)] = std::move(estimate);
      }
    }
    model.estimators[dimension] = std::move(estimator);
  }
  return model;
}

PersonalModel load_model_file(const std::filesystem::path& path) {
  return parse_model(detail::read_file(path));
}

void save_model_file(const PersonalModel& model, const std::filesystem::path& path) {
  detail::write_file(path, serialize_model(model));
}

// --- Universal table -----------------------------------------------------------

UniversalTable parse_universal_table(const std::string& json_text,
                                     const rules::DimensionRegistry& dims) {
  using detail::Json;
  const Json doc = detail::parse_json(json_text, "universal");
  const Json& entries = detail::require(doc, "entries", "universal");
  if (!entries.is_array()) {
    throw Error(ErrorKind::ParseError, "universal.entries: expected array");
  }
  UniversalTable table;
  std::size_t index = 0;
  for (const auto& e : entries) {
    const std::string where = "universal.entries[" + std::to_string(index++) + "]";
    UniversalEntry entry;
    const Json& match = detail::require(e, "match", where);
    for (const auto& [component, value] : match.items()) {
      entry.match.emplace_back(component,
                               detail::value_from_json(value, where + ".match." + component));
    }
    const Json& inferences = detail::require(e, "inferences", where);
    std::size_t inference_index = 0;
    for (const auto& i : inferences) {
      const std::string at = where + ".inferences[" + std::to_string(inference_index++) + "]";
      rules::Inference inference;
      inference.impact = detail::require_number(i, "impact", at);
      inference.source = rules::Source::universal();
      for (const auto& a : detail::require(i, "adaptations", at)) {
        rules::Adaptation adaptation;
        adaptation.dimension = detail::require_string(a, "dimension", at);
        adaptation.value = detail::value_from_json(detail::require(a, "value", at), at);
        for (const auto& t : detail::require(a, "targets", at)) {
          adaptation.targets.push_back(t.get<std::string>());
        }
        inference.adaptations.push_back(std::move(adaptation));
      }
      rules::validate(inference, dims, at);
      entry.inferences.push_back(std::move(inference));
    }
    table.entries.push_back(std::move(entry));
  }
  return table;
}

UniversalTable load_universal_table_file(const std::filesystem::path& path,
                                         const rules::DimensionRegistry& dims) {
  return parse_universal_table(detail::read_file(path), dims);
}

std::vector<rules::Inference> infer_universal(const UniversalTable& table,
                                              const Context& context) {
  std::vector<rules::Inference> out;
  for (const auto& entry : table.entries) {
    const bool matched = std::all_of(
        entry.match.begin(), entry.match.end(), [&](const auto& pair) {
          const Value* v = context.find(pair.first);
          return v != nullptr && *v == pair.second;
        });
    if (matched) {
      out.insert(out.end(), entry.inferences.begin(), entry.inferences.end());
    }
  }
  return out;
}

}  // namespace iar::learner

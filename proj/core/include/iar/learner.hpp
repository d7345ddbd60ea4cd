#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "iar/adapt.hpp"
#include "iar/context.hpp"
#include "iar/rules.hpp"

namespace iar::learner {

struct LearnerConfig {
  double alpha = 0.2;        // EMA decay toward the newest reward
  double smoothing_k = 1.0;  // confidence shrinkage: impact = ema * n / (n + k)
  std::uint64_t min_support = 3;
  // Context components that key the estimators. Contexts that agree on these
  // share learned preferences.
  std::vector<std::string> signature_components = {
      rules::kObjectiveComponent,
      rules::kMobilityComponent,
      rules::kConfinementComponent,
  };
  // Quantization step for numeric values, both in signatures and in learned
  // adaptation keys.
  double numeric_bin_width = 0.05;
  // Swap the reward signs: penalize the user's manual adaptation and reward
  // every automatic one. Off by default; see docs/formats.md for the two
  // feedback polarities.
  bool invert_feedback_polarity = false;
};

void validate(const LearnerConfig& config);  // throws ConfigError

// Projection of a context onto the configured signature components, with
// numeric values quantized. Missing components are omitted.
struct ContextSignature {
  std::vector<std::pair<std::string, std::string>> parts;  // (component, token)

  std::string key() const;

  friend bool operator==(const ContextSignature&, const ContextSignature&) = default;
};

ContextSignature signature(const Context& context, const LearnerConfig& config);

// Quantizes a numeric value to the configured bin grid; other kinds pass
// through unchanged.
Value quantize(const Value& value, const LearnerConfig& config);

// One closed feedback round: the plan the engine applied in a context and the
// manual adaptations the user performed before the next context switch.
struct FeedbackEvent {
  Context context;
  adapt::AdaptationPlan automatic;
  std::vector<rules::Adaptation> manual;
  std::int64_t timestamp_ms = 0;
};

struct Estimate {
  rules::Adaptation adaptation;  // single concrete target, quantized value
  double ema = 0.0;              // in [-1, 1]
  std::uint64_t count = 0;
};

// Per-dimension reward table: (signature key, adaptation key) -> estimate.
struct DimensionEstimator {
  std::map<std::string, std::map<std::string, Estimate>> by_signature;

  void update(const std::string& signature_key, const rules::Adaptation& adaptation,
              double reward, double alpha);
};

// The personalized inference model: one estimator per design dimension.
// Mutation must be serialized through a single owner; copies are cheap and
// safe to read concurrently.
struct PersonalModel {
  std::map<std::string, DimensionEstimator> estimators;  // keyed by dimension

  bool empty() const noexcept { return estimators.empty(); }
};

// Folds one feedback round into the model. Default polarity: manual
// adaptations and un-overridden automatic ones earn +1, automatic adaptations
// the user overrode on the same (dimension, target) earn -1.
void observe(PersonalModel& model, const FeedbackEvent& event, const LearnerConfig& config);

// Personalized inferences for the context's signature: every stored key with
// count >= min_support, impact = ema * count / (count + k).
std::vector<rules::Inference> infer_personal(const PersonalModel& model,
                                             const Context& context,
                                             const LearnerConfig& config);

// Versioned JSON checkpoint. Serialization is canonical: identical models
// produce identical bytes.
std::string serialize_model(const PersonalModel& model);
PersonalModel parse_model(const std::string& json_text);
PersonalModel load_model_file(const std::filesystem::path& path);
void save_model_file(const PersonalModel& model, const std::filesystem::path& path);

// --- Universal inferences ------------------------------------------------------

// Hook for population-trained inferences. No training happens here; entries
// are precomputed and matched by exact equality on the listed components.
struct UniversalEntry {
  std::vector<std::pair<std::string, Value>> match;
  std::vector<rules::Inference> inferences;  // source = Universal
};

struct UniversalTable {
  std::vector<UniversalEntry> entries;
};

UniversalTable parse_universal_table(const std::string& json_text,
                                     const rules::DimensionRegistry& dims);
UniversalTable load_universal_table_file(const std::filesystem::path& path,
                                         const rules::DimensionRegistry& dims);
std::vector<rules::Inference> infer_universal(const UniversalTable& table,
                                              const Context& context);

}  // namespace iar::learner

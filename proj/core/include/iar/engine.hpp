#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "iar/adapt.hpp"
#include "iar/context.hpp"
#include "iar/learner.hpp"
#include "iar/rules.hpp"
#include "iar/spatial.hpp"

namespace iar {

// Engine-wide configuration. Relative paths resolve against the config file's
// directory. Referenced files must exist at load time.
struct EngineConfig {
  std::filesystem::path registry_path;
  std::filesystem::path rulepack_path;
  std::optional<std::filesystem::path> model_path;
  std::optional<std::filesystem::path> universal_path;
  learner::LearnerConfig learner;
  adapt::SourceWeights weights;
  spatial::SpatialConfig spatial;
  std::uint64_t seed = 1;
};

EngineConfig parse_engine_config(const std::string& json_text,
                                 const std::filesystem::path& base_dir);
EngineConfig load_engine_config_file(const std::filesystem::path& path);

// One adaptation cycle for a context snapshot: rule, personalized, and
// universal inferences -> consolidation -> optimization -> application.
struct CycleResult {
  std::vector<adapt::ConsolidatedInference> candidates;
  adapt::AdaptationPlan plan;
  adapt::InterfaceState state;
};

CycleResult run_cycle(const Context& context, const rules::RuleBase& rulebase,
                      const learner::PersonalModel* model,
                      const learner::UniversalTable* universal,
                      const adapt::InterfaceState& state, const adapt::SourceWeights& weights,
                      const learner::LearnerConfig& learner_config);

}  // namespace iar

#include "iar/engine.hpp"

#include "iar/error.hpp"
#include "json_util.hpp"

namespace iar {

namespace {

using detail::Json;

std::filesystem::path resolve(const std::string& raw, const std::filesystem::path& base_dir,
                              const char* what, bool must_exist) {
  std::filesystem::path p(raw);
  if (p.is_relative()) p = base_dir / p;
  if (must_exist && !std::filesystem::exists(p)) {
    throw Error(ErrorKind::ConfigError,
                std::string(what) + " file does not exist: " + p.string());
  }
  return p;
}

}  // namespace

EngineConfig parse_engine_config(const std::string& json_text,
                                 const std::filesystem::path& base_dir) {
  const Json doc = detail::parse_json(json_text, "config");
  EngineConfig config;

  const Json& paths = detail::require(doc, "paths", "config");
  config.registry_path =
      resolve(detail::require_string(paths, "registry", "config.paths"), base_dir,
              "registry", true);
  config.rulepack_path =
      resolve(detail::require_string(paths, "rulepack", "config.paths"), base_dir,
              "rulepack", true);
  if (paths.contains("model") && !paths["model"].is_null()) {
    config.model_path = resolve(paths["model"].get<std::string>(), base_dir, "model", true);
  }
  if (paths.contains("universal") && !paths["universal"].is_null()) {
    config.universal_path =
        resolve(paths["universal"].get<std::string>(), base_dir, "universal table", true);
  }

  if (doc.contains("learner")) {
    const Json& l = doc["learner"];
    config.learner.alpha = l.value("alpha", config.learner.alpha);
    config.learner.smoothing_k = l.value("smoothing_k", config.learner.smoothing_k);
    config.learner.min_support = l.value("min_support", config.learner.min_support);
    config.learner.numeric_bin_width =
        l.value("numeric_bin_width", config.learner.numeric_bin_width);
    config.learner.invert_feedback_polarity =
        l.value("invert_feedback_polarity", config.learner.invert_feedback_polarity);
    if (l.contains("signature_components")) {
      config.learner.signature_components.clear();
      for (const auto& c : l["signature_components"]) {
        config.learner.signature_components.push_back(c.get<std::string>());
      }
    }
  }
  learner::validate(config.learner);

  if (doc.contains("consolidation_weights")) {
    const Json& w = doc["consolidation_weights"];
    config.weights.rule = w.value("rule", config.weights.rule);
    config.weights.personalized = w.value("personalized", config.weights.personalized);
    config.weights.universal = w.value("universal", config.weights.universal);
  }

  if (doc.contains("spatial")) {
    const Json& s = doc["spatial"];
    auto& sp = config.spatial;
    sp.fov_diagonal_deg = s.value("fov_diagonal_deg", sp.fov_diagonal_deg);
    sp.display_aspect_w = s.value("display_aspect_w", sp.display_aspect_w);
    sp.display_aspect_h = s.value("display_aspect_h", sp.display_aspect_h);
    sp.far_turn_threshold_deg = s.value("far_turn_threshold_deg", sp.far_turn_threshold_deg);
    sp.orientation_dot_threshold =
        s.value("orientation_dot_threshold", sp.orientation_dot_threshold);
    sp.vertical_eye_band_deg = s.value("vertical_eye_band_deg", sp.vertical_eye_band_deg);
    sp.motion_epsilon_m = s.value("motion_epsilon_m", sp.motion_epsilon_m);
  }
  spatial::validate(config.spatial);

  config.seed = doc.value("seed", config.seed);
  return config;
}

EngineConfig load_engine_config_file(const std::filesystem::path& path) {
  return parse_engine_config(detail::read_file(path), path.parent_path());
}

CycleResult run_cycle(const Context& context, const rules::RuleBase& rulebase,
                      const learner::PersonalModel* model,
                      const learner::UniversalTable* universal,
                      const adapt::InterfaceState& state, const adapt::SourceWeights& weights,
                      const learner::LearnerConfig& learner_config) {
  std::vector<rules::Inference> inferences = rules::infer_rules(rulebase, context);
  if (model != nullptr) {
    auto personal = learner::infer_personal(*model, context, learner_config);
    inferences.insert(inferences.end(), personal.begin(), personal.end());
  }
  if (universal != nullptr) {
    auto batch = learner::infer_universal(*universal, context);
    inferences.insert(inferences.end(), batch.begin(), batch.end());
  }
  CycleResult result;
  result.candidates = adapt::consolidate(inferences, weights);
  result.plan = adapt::optimize(result.candidates, state);
  result.state = adapt::apply(result.plan, state);
  return result;
}

}  // namespace iar

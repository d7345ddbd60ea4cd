// iar: operator CLI for the context-aware inference and adaptation engine.
//
// Subcommands: validate, infer, replay, analyze, learn, synth.
// Exit codes: 0 success, 1 validation failure, 2 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "iar/engine.hpp"
#include "iar/error.hpp"
#include "iar/harness.hpp"
#include "iar/learner.hpp"
#include "iar/rules.hpp"

namespace {

using iar::Error;
using iar::ErrorKind;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::IoError ? kExitIo : kExitValidation;
}

std::string read_file_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_or_throw(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
}

// Shared flags: a config file plus per-path overrides.
struct CommonOptions {
  std::string config_path;
  std::string rulepack_path;
  std::string registry_path;
  std::string model_path;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Engine config file (JSON)");
  cmd->add_option("--rulepack", opts.rulepack_path, "Rulepack path (overrides config)");
  cmd->add_option("--registry", opts.registry_path, "Component registry path (overrides config)");
  cmd->add_option("--model", opts.model_path, "Learner checkpoint path (overrides config)");
  cmd->add_option("--seed", opts.seed, "Deterministic seed (overrides config)");
  cmd->add_flag("--json", opts.json, "Emit machine-readable JSON");
}

iar::EngineConfig resolve_config(const CommonOptions& opts) {
  iar::EngineConfig config;
  if (!opts.config_path.empty()) {
    config = iar::load_engine_config_file(opts.config_path);
  } else {
    if (opts.registry_path.empty() || opts.rulepack_path.empty()) {
      throw Error(ErrorKind::ConfigError,
                  "either --config or both --registry and --rulepack are required");
    }
  }
  if (!opts.registry_path.empty()) config.registry_path = opts.registry_path;
  if (!opts.rulepack_path.empty()) config.rulepack_path = opts.rulepack_path;
  if (!opts.model_path.empty()) config.model_path = opts.model_path;
  if (opts.seed) config.seed = *opts.seed;
  return config;
}

// Context document: {"timestamp_ms": ..., "entities": [...], "entries": {id: value}}.
struct ContextDocument {
  iar::Context context;
  std::vector<std::string> entities;
};

ContextDocument load_context_document(const std::filesystem::path& path,
                                      const iar::ComponentRegistry& registry,
                                      bool derive_roles) {
  const Json doc = Json::parse(read_file_or_throw(path), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorKind::ParseError, path.string() + ": invalid JSON");
  }
  ContextDocument out;
  const std::int64_t ts = doc.value("timestamp_ms", 0);
  iar::ContextStore store(registry);
  if (doc.contains("entries")) {
    for (const auto& [id, raw] : doc["entries"].items()) {
      iar::Value value;
      if (raw.is_string()) {
        value = iar::Value::categorical(raw.get<std::string>());
      } else if (raw.is_number()) {
        value = iar::Value::number(raw.get<double>());
      } else if (raw.is_boolean()) {
        value = iar::Value::boolean(raw.get<bool>());
      } else {
        throw Error(ErrorKind::ParseError, path.string() + ": unsupported value for " + id);
      }
      store.upsert(id, value, ts);
    }
  }
  if (derive_roles) {
    const iar::Context draft = store.snapshot();
    const bool has_study_components = draft.find(iar::rules::kObjectiveComponent) &&
                                      draft.find(iar::rules::kMobilityComponent) &&
                                      draft.find(iar::rules::kConfinementComponent);
    if (has_study_components) {
      for (const auto& [component, value] :
           iar::rules::derive_app_roles(draft, iar::rules::study_role_table())) {
        if (registry.contains(component)) store.upsert(component, value, ts);
      }
    }
  }
  out.context = store.snapshot();
  if (doc.contains("entities")) {
    for (const auto& e : doc["entities"]) out.entities.push_back(e.get<std::string>());
  }
  return out;
}

int cmd_validate(const CommonOptions& opts, const std::string& rulepack_arg) {
  const std::string rulepack_path =
      !rulepack_arg.empty() ? rulepack_arg : resolve_config(opts).rulepack_path.string();
  iar::ComponentRegistry registry;
  if (!opts.registry_path.empty()) {
    registry = iar::load_registry_file(opts.registry_path);
  } else if (!opts.config_path.empty()) {
    registry = iar::load_registry_file(resolve_config(opts).registry_path);
  } else {
    registry = iar::load_registry_file(
        std::filesystem::path(rulepack_path).parent_path() / "registry_v1.json");
  }
  const auto rulebase = iar::rules::load_rulepack_file(rulepack_path, registry);
  std::cout << rulepack_path << ": OK (" << rulebase.principles.size() << " principles)\n";
  return kExitOk;
}

int cmd_infer(const CommonOptions& opts, const std::string& context_path, bool no_roles) {
  const auto config = resolve_config(opts);
  const auto registry = iar::load_registry_file(config.registry_path);
  const auto rulebase = iar::rules::load_rulepack_file(config.rulepack_path, registry);

  iar::learner::PersonalModel model;
  if (config.model_path) model = iar::learner::load_model_file(*config.model_path);
  iar::learner::UniversalTable universal;
  if (config.universal_path) {
    universal = iar::learner::load_universal_table_file(*config.universal_path,
                                                        rulebase.dimensions);
  }

  const auto doc = load_context_document(context_path, registry, !no_roles);
  iar::adapt::InterfaceState state;
  if (doc.entities.empty()) {
    state = iar::harness::study_scenario().default_state;
  } else {
    for (const auto& entity : doc.entities) state.entities[entity] = {};
  }

  const auto result =
      iar::run_cycle(doc.context, rulebase, model.empty() ? nullptr : &model,
                     config.universal_path ? &universal : nullptr, state, config.weights,
                     config.learner);
  std::cout << iar::adapt::serialize_plan(result.plan, result.candidates);
  return kExitOk;
}

int cmd_analyze(const CommonOptions& opts, const std::string& trace_path,
                const std::string& out_path) {
  const auto trace = iar::harness::load_trace_file(trace_path);
  const auto report = iar::harness::analyze(trace);
  const std::string json = iar::harness::serialize_analysis(report);
  if (!out_path.empty()) write_file_or_throw(out_path, json);
  std::cout << (opts.json ? json : iar::harness::render_analysis(report));
  return kExitOk;
}

int cmd_replay(const CommonOptions& opts, const std::string& trace_path,
               const std::string& out_path, const std::string& model_out) {
  const auto config = resolve_config(opts);
  const auto registry = iar::load_registry_file(config.registry_path);
  const auto rulebase = iar::rules::load_rulepack_file(config.rulepack_path, registry);
  const auto trace = iar::harness::load_trace_file(trace_path);

  iar::learner::PersonalModel model;
  const bool with_learner = config.model_path.has_value() || !model_out.empty();
  if (config.model_path) model = iar::learner::load_model_file(*config.model_path);

  iar::harness::ReplayConfig replay_config{config.weights, config.learner};
  const auto report = iar::harness::replay(iar::harness::study_scenario(), rulebase,
                                           with_learner ? &model : nullptr, trace,
                                           replay_config);
  const std::string json = iar::harness::serialize_replay_report(report);
  if (!out_path.empty()) write_file_or_throw(out_path, json);
  if (!model_out.empty()) iar::learner::save_model_file(model, model_out);
  std::cout << (opts.json ? json : iar::harness::render_replay_report(report));
  return kExitOk;
}

int cmd_learn(const CommonOptions& opts, const std::string& trace_path,
              const std::string& out_path) {
  const auto config = resolve_config(opts);
  const auto registry = iar::load_registry_file(config.registry_path);
  const auto rulebase = iar::rules::load_rulepack_file(config.rulepack_path, registry);
  const auto trace = iar::harness::load_trace_file(trace_path);

  iar::learner::PersonalModel model;
  if (config.model_path) model = iar::learner::load_model_file(*config.model_path);

  iar::harness::ReplayConfig replay_config{config.weights, config.learner};
  const auto report = iar::harness::replay(iar::harness::study_scenario(), rulebase, &model,
                                           trace, replay_config);
  iar::learner::save_model_file(model, out_path);
  if (opts.json) {
    std::cout << iar::harness::serialize_replay_report(report);
  } else {
    std::cout << "checkpoint written to " << out_path << "\n"
              << iar::harness::render_replay_report(report);
  }
  return kExitOk;
}

int cmd_synth(const CommonOptions& opts, const std::string& marginals_path,
              const std::string& out_path) {
  const auto config = marginals_path.empty()
                          ? iar::harness::study_marginals()
                          : iar::harness::load_marginals_file(marginals_path);
  const std::uint64_t seed = opts.seed.value_or(1);
  const auto trace = iar::harness::synth_trace(seed, config);
  const std::string csv = iar::harness::serialize_trace(
      trace, {"iar-trace-v1 generator=synth seed=" + std::to_string(seed) +
              " marginals=" + config.name});
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file_or_throw(out_path, csv);
    std::cout << "wrote " << trace.size() << " events to " << out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware inference and adaptation engine"};
  app.require_subcommand(1);

  CommonOptions opts;

  auto* validate = app.add_subcommand("validate", "Validate a rulepack");
  std::string validate_rulepack;
  validate->add_option("pack", validate_rulepack, "Rulepack JSON file");
  add_common_flags(validate, opts);

  auto* infer = app.add_subcommand("infer", "One-shot inference for a context file");
  std::string context_path;
  bool no_roles = false;
  infer->add_option("--context", context_path, "Context JSON file")->required();
  infer->add_flag("--no-roles", no_roles, "Skip automatic app-role derivation");
  add_common_flags(infer, opts);

  auto* analyze = app.add_subcommand("analyze", "Descriptive statistics for a trace");
  std::string trace_path;
  std::string out_path;
  analyze->add_option("--trace", trace_path, "Trace CSV file")->required();
  analyze->add_option("--out", out_path, "Write the JSON report here");
  add_common_flags(analyze, opts);

  auto* replay = app.add_subcommand("replay", "Replay a trace through the engine");
  std::string model_out;
  replay->add_option("--trace", trace_path, "Trace CSV file")->required();
  replay->add_option("--out", out_path, "Write the JSON report here");
  replay->add_option("--model-out", model_out, "Write the trained checkpoint here");
  add_common_flags(replay, opts);

  auto* learn = app.add_subcommand("learn", "Train the learner from a trace");
  learn->add_option("--trace", trace_path, "Trace CSV file")->required();
  learn->add_option("--out", out_path, "Checkpoint output path")->required();
  add_common_flags(learn, opts);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic study trace");
  std::string marginals_path;
  synth->add_option("--marginals", marginals_path, "Marginals config (JSON)");
  synth->add_option("--out", out_path, "Trace CSV output path");
  add_common_flags(synth, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (validate->parsed()) return cmd_validate(opts, validate_rulepack);
    if (infer->parsed()) return cmd_infer(opts, context_path, no_roles);
    if (analyze->parsed()) return cmd_analyze(opts, trace_path, out_path);
    if (replay->parsed()) return cmd_replay(opts, trace_path, out_path, model_out);
    if (learn->parsed()) return cmd_learn(opts, trace_path, out_path);
    if (synth->parsed()) return cmd_synth(opts, marginals_path, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

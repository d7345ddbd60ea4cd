#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "iar/adapt.hpp"
#include "iar/learner.hpp"
#include "iar/rules.hpp"

namespace iar::harness {

// One logged adaptation row from the study CSV schema:
//   timestamp_ms,participant,context,app,dimension,value
struct TraceEvent {
  std::int64_t timestamp_ms = 0;
  std::string participant;
  std::string context_label;  // C1..C8
  std::string app;
  std::string dimension;
  Value value;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// The eight-context library session: per-context component assignments, the
// five-app entity list, and the interface state everyone starts from.
struct StudyScenario {
  struct ContextDef {
    std::string label;
    std::string objective;
    std::string mobility;
    std::string confinement;
  };

  std::vector<ContextDef> contexts;  // replayed in this order
  std::vector<std::string> apps;
  adapt::InterfaceState default_state;
};

StudyScenario study_scenario();

// Parses and validates a trace. Lines starting with '#' are provenance
// comments. Rows are validated against the study vocabulary and dimension
// domains and returned sorted by timestamp (stable). Throws SchemaError with
// the offending row and column.
std::vector<TraceEvent> ingest_trace(const std::string& csv_text);
std::vector<TraceEvent> load_trace_file(const std::filesystem::path& path);

// CSV form of the events; `provenance` lines are embedded as '#' comments.
std::string serialize_trace(const std::vector<TraceEvent>& events,
                            const std::vector<std::string>& provenance = {});

using DesignVector = std::map<std::string, Value>;  // dimension -> value
// (participant, context label, app)
using FinalKey = std::tuple<std::string, std::string, std::string>;

// Each participant's final design of each app within each context:
// last write wins inside a context span, untouched apps inherit the previous
// context's final state (starting from the scenario default).
std::map<FinalKey, DesignVector> final_choices(const std::vector<TraceEvent>& events,
                                               const StudyScenario& scenario);
std::map<FinalKey, DesignVector> final_choices(const std::vector<TraceEvent>& events);

// Descriptive statistics over a trace's final choices.
struct AnalysisReport {
  std::size_t final_choice_count = 0;
  double visible_rate = 0.0;
  std::map<std::string, double> visible_rate_by_context;
  std::map<std::string, double> for_share_among_visible;  // HeadFixed/BodyFixed/WorldFixed
  std::map<std::string, double> mean_scale_by_for;
  std::map<std::string, double> mean_opacity_by_for;
  std::map<std::string, double> mean_opacity_by_sector;  // body-fixed apps
  std::map<std::string, double> visible_rate_by_role;
  std::map<std::string, double> headfixed_share_by_role;  // among visible
  std::size_t domain_violations = 0;
};

AnalysisReport analyze(const std::vector<TraceEvent>& events);
std::string serialize_analysis(const AnalysisReport& report);
std::string render_analysis(const AnalysisReport& report);

// --- Synthetic fixture --------------------------------------------------------

// Target marginals for the synthetic trace generator. Defaults reproduce the
// bundled study statistics; see data/study_marginals_v1.json.
struct MarginalsConfig {
  std::string name = "study_marginals_v1";
  int participants = 20;
  // Fraction of the context's 5 apps left visible. Relevant apps are never
  // minimized, so the minimized quota falls on the irrelevant ones.
  std::map<std::string, double> visible_rate_by_context;
  // Frame-of-reference shares among visible apps.
  double body_share = 0.90;
  double head_share = 0.09;
  double world_share = 0.01;

  struct ValueModel {
    double spike_at_one = 0.0;  // probability of exactly 1.0
    double mean = 1.0;
    double sd = 0.0;
  };
  ValueModel body_opacity{0.60, 0.88, 0.12};
  ValueModel body_scale{0.00, 0.80, 0.32};
  ValueModel head_opacity{0.30, 0.85, 0.20};
  ValueModel head_scale{0.00, 0.57, 0.18};

  // Designs are sticky per (participant, app); these are the per-context
  // chances of reworking one dimension after the initial setup.
  double sector_tweak_rate = 0.08;
  double value_tweak_rate = 0.12;

  std::map<std::string, double> body_sector_weights;
  std::map<std::string, double> head_sector_weights;
};

MarginalsConfig study_marginals();
MarginalsConfig parse_marginals(const std::string& json_text);
MarginalsConfig load_marginals_file(const std::filesystem::path& path);
std::string serialize_marginals(const MarginalsConfig& config);

// Deterministic per seed. Visibility and frame-of-reference marginals are met
// by quota assignment, so the generated rates land on the configured values
// up to integer rounding; scale/opacity are sampled within their domains.
std::vector<TraceEvent> synth_trace(std::uint64_t seed, const MarginalsConfig& config);

// --- Replay -------------------------------------------------------------------

struct ReplayConfig {
  adapt::SourceWeights weights;
  learner::LearnerConfig learner;
};

struct ReplayCell {
  std::string context_label;
  std::string app;
  std::string dimension;
  std::string engine_choice;  // modal engine value token across participants
  std::string trace_choice;   // modal trace final value token
  double agreement = 0.0;
};

struct ReplayReport {
  double agreement_overall = 0.0;
  std::map<std::string, double> agreement_by_dimension;
  std::map<std::string, double> agreement_by_context;
  std::size_t churn = 0;  // state changes induced by engine plans
  std::vector<ReplayCell> cells;
  AnalysisReport trace_stats;
};

// Plays the scenario's contexts in order for every participant of the trace:
// snapshot (components + derived app roles) -> rule + personalized inferences
// -> consolidate -> optimize -> apply, then closes the feedback round against
// the participant's logged adaptations. `model` may be null to replay with
// rule-based inference only; when given, it both drives personalized
// inferences and keeps learning between contexts. Numeric values agree when
// within 0.05; categorical values must match exactly.
ReplayReport replay(const StudyScenario& scenario, const rules::RuleBase& rulebase,
                    learner::PersonalModel* model, const std::vector<TraceEvent>& trace,
                    const ReplayConfig& config);

std::string serialize_replay_report(const ReplayReport& report);
std::string render_replay_report(const ReplayReport& report);

}  // namespace iar::harness

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "iar/error.hpp"
#include "iar/harness.hpp"
#include "json_util.hpp"

namespace iar::harness {

namespace {

constexpr const char* kDimensionOrder[] = {
    "visibility", "frame_of_reference", "position_sector", "scale", "opacity"};

// Numeric values agree within half a slider step; everything else exactly.
bool values_agree(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    return std::abs(a.as_number().magnitude - b.as_number().magnitude) <= 0.05 + 1e-12;
  }
  return a == b;
}

struct RateAccumulator {
  std::size_t hits = 0;
  std::size_t total = 0;

  void add(bool hit) {
    hits += hit ? 1 : 0;
    ++total;
  }
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(hits) / total; }
};

struct CellAccumulator {
  RateAccumulator agreement;
  std::map<std::string, std::size_t> engine_tokens;
  std::map<std::string, std::size_t> trace_tokens;
};

std::string modal_token(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [token, count] : counts) {  // key order breaks ties
    if (count > best_count) {
      best = token;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

ReplayReport replay(const StudyScenario& scenario, const rules::RuleBase& rulebase,
                    learner::PersonalModel* model, const std::vector<TraceEvent>& trace,
                    const ReplayConfig& config) {
  const ComponentRegistry registry = rules::study_registry();
  const rules::RoleTable roles = rules::study_role_table();
  const auto finals = final_choices(trace, scenario);

  std::set<std::string> participants;
  std::map<std::pair<std::string, std::string>, std::vector<const TraceEvent*>> events_by_pc;
  for (const auto& e : trace) {
    participants.insert(e.participant);
    events_by_pc[{e.participant, e.context_label}].push_back(&e);
  }

  RateAccumulator overall;
  std::map<std::string, RateAccumulator> by_dimension;
  std::map<std::string, RateAccumulator> by_context;
  std::map<std::tuple<std::string, std::string, std::string>, CellAccumulator> cells;
  std::size_t churn = 0;

  for (const auto& participant : participants) {
    adapt::InterfaceState state = scenario.default_state;
    ContextStore store(registry);
    std::int64_t ts = 0;
    for (const auto& context_def : scenario.contexts) {
      ts += 1000;
      store.upsert(rules::kObjectiveComponent, Value::categorical(context_def.objective), ts);
      store.upsert(rules::kMobilityComponent, Value::categorical(context_def.mobility), ts);
      store.upsert(rules::kConfinementComponent, Value::categorical(context_def.confinement),
                   ts);
      const Context draft = store.snapshot();
      for (const auto& [component, value] : rules::derive_app_roles(draft, roles)) {
        store.upsert(component, value, ts);
      }
      const Context ctx = store.snapshot();

      std::vector<rules::Inference> inferences = rules::infer_rules(rulebase, ctx);
      if (model != nullptr) {
        auto personal = learner::infer_personal(*model, ctx, config.learner);
        inferences.insert(inferences.end(), personal.begin(), personal.end());
      }
      const auto candidates = adapt::consolidate(inferences, config.weights);
      const auto plan = adapt::optimize(candidates, state);
      for (const auto& selected : plan.selected) {
        for (const auto& adaptation : selected.adaptations) {
          for (const auto& target : adaptation.targets) {
            const Value* current = state.find(target, adaptation.dimension);
            if (current == nullptr || *current != adaptation.value) ++churn;
          }
        }
      }
      state = adapt::apply(plan, state);

      for (const auto& app : scenario.apps) {
        const DesignVector& traced = finals.at({participant, context_def.label, app});
        for (const char* dimension : kDimensionOrder) {
          const Value& engine_value = state.entities.at(app).at(dimension);
          const Value& trace_value = traced.at(dimension);
          const bool agree = values_agree(engine_value, trace_value);
          overall.add(agree);
          by_dimension[dimension].add(agree);
          by_context[context_def.label].add(agree);
          auto& cell = cells[{context_def.label, app, dimension}];
          cell.agreement.add(agree);
          ++cell.engine_tokens[engine_value.token()];
          ++cell.trace_tokens[trace_value.token()];
        }
      }

      if (model != nullptr) {
        learner::FeedbackEvent feedback;
        feedback.context = ctx;
        feedback.automatic = plan;
        feedback.timestamp_ms = ts;
        auto it = events_by_pc.find({participant, context_def.label});
        if (it != events_by_pc.end()) {
          for (const TraceEvent* e : it->second) {
            feedback.manual.push_back({e->dimension, e->value, {e->app}});
          }
        }
        learner::observe(*model, feedback, config.learner);
      }
    }
  }

  ReplayReport report;
  report.agreement_overall = overall.rate();
  for (const auto& [dimension, acc] : by_dimension) {
    report.agreement_by_dimension[dimension] = acc.rate();
  }
  for (const auto& [context, acc] : by_context) {
    report.agreement_by_context[context] = acc.rate();
  }
  report.churn = churn;
  for (const auto& context_def : scenario.contexts) {
    for (const auto& app : scenario.apps) {
      for (const char* dimension : kDimensionOrder) {
        auto it = cells.find({context_def.label, app, dimension});
        if (it == cells.end()) continue;
        report.cells.push_back({context_def.label, app, dimension,
                                modal_token(it->second.engine_tokens),
                                modal_token(it->second.trace_tokens),
                                it->second.agreement.rate()});
      }
    }
  }
  report.trace_stats = analyze(trace);
  return report;
}

std::string serialize_replay_report(const ReplayReport& report) {
  detail::Json cells = detail::Json::array();
  for (const auto& cell : report.cells) {
    cells.push_back(detail::Json{{"context", cell.context_label},
                                 {"app", cell.app},
                                 {"dimension", cell.dimension},
                                 {"engine", cell.engine_choice},
                                 {"trace", cell.trace_choice},
                                 {"agreement", cell.agreement}});
  }
  detail::Json doc{
      {"report_version", 1},
      {"agreement_overall", report.agreement_overall},
      {"agreement_by_dimension", detail::map_to_json(report.agreement_by_dimension)},
      {"agreement_by_context", detail::map_to_json(report.agreement_by_context)},
      {"churn", report.churn},
      {"cells", std::move(cells)},
      {"trace_stats", detail::parse_json(serialize_analysis(report.trace_stats), "analysis")},
  };
  return doc.dump(2) + "\n";
}

std::string render_replay_report(const ReplayReport& report) {
  std::ostringstream out;
  auto pct = [](double v) {
    return format_double(std::round(v * 1000.0) / 10.0) + "%";
  };
  out << "agreement overall: " << pct(report.agreement_overall) << "\n";
  out << "agreement by dimension:\n";
  for (const auto& [dimension, rate] : report.agreement_by_dimension) {
    out << "  " << dimension << ": " << pct(rate) << "\n";
  }
  out << "agreement by context:\n";
  for (const auto& [context, rate] : report.agreement_by_context) {
    out << "  " << context << ": " << pct(rate) << "\n";
  }
  out << "plan-induced state changes (churn): " << report.churn << "\n";
  return out.str();
}

}  // namespace iar::harness

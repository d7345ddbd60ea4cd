#include "iar/harness.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "iar/error.hpp"
#include "json_util.hpp"

namespace iar::harness {

namespace {

constexpr const char* kCsvHeader = "timestamp_ms,participant,context,app,dimension,value";

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

[[noreturn]] void schema_error(std::size_t row, const std::string& column,
                               const std::string& what) {
  throw Error(ErrorKind::SchemaError,
              "row " + std::to_string(row) + ", column '" + column + "': " + what);
}

double parse_csv_double(const std::string& s, std::size_t row, const std::string& column) {
  double out = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    schema_error(row, column, "'" + s + "' is not a number");
  }
  return out;
}

}  // namespace

std::vector<TraceEvent> ingest_trace(const std::string& csv_text) {
  const StudyScenario scenario = study_scenario();
  const rules::DimensionRegistry dims = rules::study_dimensions();

  std::vector<TraceEvent> events;
  std::istringstream in(csv_text);
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader) {
        schema_error(row, "header", "expected '" + std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_row(line);
    if (fields.size() != 6) {
      schema_error(row, "row", "expected 6 fields, got " + std::to_string(fields.size()));
    }
    TraceEvent event;
    event.timestamp_ms =
        static_cast<std::int64_t>(parse_csv_double(fields[0], row, "timestamp_ms"));
    event.participant = fields[1];
    if (event.participant.empty()) schema_error(row, "participant", "empty");
    event.context_label = fields[2];
    const bool known_context =
        std::any_of(scenario.contexts.begin(), scenario.contexts.end(),
                    [&](const auto& c) { return c.label == event.context_label; });
    if (!known_context) {
      schema_error(row, "context", "unknown context '" + event.context_label + "'");
    }
    event.app = fields[3];
    if (std::find(scenario.apps.begin(), scenario.apps.end(), event.app) ==
        scenario.apps.end()) {
      schema_error(row, "app", "unknown app '" + event.app + "'");
    }
    event.dimension = fields[4];
    const ValueDomain* domain = dims.find(event.dimension);
    if (domain == nullptr) {
      schema_error(row, "dimension", "unknown dimension '" + event.dimension + "'");
    }
    if (std::holds_alternative<NumericDomain>(*domain)) {
      event.value = Value::number(parse_csv_double(fields[5], row, "value"));
    } else {
      event.value = Value::categorical(fields[5]);
    }
    if (!admits(*domain, event.value)) {
      schema_error(row, "value",
                   "'" + fields[5] + "' not in domain " + describe(*domain) + " of " +
                       event.dimension);
    }
    events.push_back(std::move(event));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  return events;
}

std::vector<TraceEvent> load_trace_file(const std::filesystem::path& path) {
  return ingest_trace(detail::read_file(path));
}

std::string serialize_trace(const std::vector<TraceEvent>& events,
                            const std::vector<std::string>& provenance) {
  std::string out;
  for (const auto& note : provenance) {
    out += "# " + note + "\n";
  }
  out += kCsvHeader;
  out += "\n";
  for (const auto& e : events) {
    out += std::to_string(e.timestamp_ms) + "," + e.participant + "," + e.context_label +
           "," + e.app + "," + e.dimension + "," + e.value.token() + "\n";
  }
  return out;
}

std::map<FinalKey, DesignVector> final_choices(const std::vector<TraceEvent>& events,
                                               const StudyScenario& scenario) {
  // Group once; events are timestamp-sorted already.
  std::map<std::string, std::map<std::string, std::vector<const TraceEvent*>>> by_participant;
  for (const auto& e : events) {
    by_participant[e.participant][e.context_label].push_back(&e);
  }

  std::map<FinalKey, DesignVector> finals;
  for (const auto& [participant, by_context] : by_participant) {
    adapt::InterfaceState state = scenario.default_state;
    for (const auto& context : scenario.contexts) {
      auto it = by_context.find(context.label);
      if (it != by_context.end()) {
        for (const TraceEvent* e : it->second) {
          state.entities[e->app][e->dimension] = e->value;
        }
      }
      for (const auto& app : scenario.apps) {
        finals[{participant, context.label, app}] = state.entities.at(app);
      }
    }
  }
  return finals;
}

std::map<FinalKey, DesignVector> final_choices(const std::vector<TraceEvent>& events) {
  return final_choices(events, study_scenario());
}

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
};

struct RateAccumulator {
  std::size_t hits = 0;
  std::size_t total = 0;

  void add(bool hit) {
    hits += hit ? 1 : 0;
    ++total;
  }
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(hits) / total; }
};

}  // namespace

AnalysisReport analyze(const std::vector<TraceEvent>& events) {
  const StudyScenario scenario = study_scenario();
  const rules::DimensionRegistry dims = rules::study_dimensions();
  const rules::RoleTable roles = rules::study_role_table();
  const auto finals = final_choices(events, scenario);

  // App role per (context, app), from the scenario's component assignments.
  std::map<std::pair<std::string, std::string>, std::string> role_of;
  for (const auto& context : scenario.contexts) {
    Context ctx;
    ctx.entries[rules::kObjectiveComponent] = Value::categorical(context.objective);
    ctx.entries[rules::kMobilityComponent] = Value::categorical(context.mobility);
    ctx.entries[rules::kConfinementComponent] = Value::categorical(context.confinement);
    for (const auto& [component, value] : rules::derive_app_roles(ctx, roles)) {
      for (const auto& app : scenario.apps) {
        if (component == rules::app_role_component(app)) {
          role_of[{context.label, app}] = value.as_categorical();
        }
      }
    }
  }

  AnalysisReport report;
  report.final_choice_count = finals.size();

  std::size_t violations = 0;
  for (const auto& e : events) {
    const ValueDomain* domain = dims.find(e.dimension);
    if (domain == nullptr || !admits(*domain, e.value)) ++violations;
  }
  report.domain_violations = violations;

  RateAccumulator visible_overall;
  std::map<std::string, RateAccumulator> visible_by_context;
  std::map<std::string, RateAccumulator> visible_by_role;
  std::map<std::string, std::size_t> for_counts;
  std::size_t visible_count = 0;
  std::map<std::string, MeanAccumulator> scale_by_for;
  std::map<std::string, MeanAccumulator> opacity_by_for;
  std::map<std::string, MeanAccumulator> opacity_by_sector;
  std::map<std::string, RateAccumulator> headfixed_by_role;

  for (const auto& [key, design] : finals) {
    const auto& [participant, context, app] = key;
    const bool visible = design.at("visibility") == Value::categorical("Visible");
    visible_overall.add(visible);
    visible_by_context[context].add(visible);
    const std::string& role = role_of.at({context, app});
    visible_by_role[role].add(visible);
    if (!visible) continue;

    ++visible_count;
    const std::string frame = design.at("frame_of_reference").as_categorical();
    ++for_counts[frame];
    headfixed_by_role[role].add(frame == "HeadFixed");
    const double scale = design.at("scale").as_number().magnitude;
    const double opacity = design.at("opacity").as_number().magnitude;
    scale_by_for[frame].add(scale);
    opacity_by_for[frame].add(opacity);
    if (frame == "BodyFixed") {
      opacity_by_sector[design.at("position_sector").as_categorical()].add(opacity);
    }
  }

  report.visible_rate = visible_overall.rate();
  for (const auto& [context, acc] : visible_by_context) {
    report.visible_rate_by_context[context] = acc.rate();
  }
  for (const auto& [frame, count] : for_counts) {
    report.for_share_among_visible[frame] =
        visible_count == 0 ? 0.0 : static_cast<double>(count) / visible_count;
  }
  for (const auto& [frame, acc] : scale_by_for) {
    report.mean_scale_by_for[frame] = acc.mean();
  }
  for (const auto& [frame, acc] : opacity_by_for) {
    report.mean_opacity_by_for[frame] = acc.mean();
  }
  for (const auto& [sector, acc] : opacity_by_sector) {
    report.mean_opacity_by_sector[sector] = acc.mean();
  }
  for (const auto& [role, acc] : visible_by_role) {
    report.visible_rate_by_role[role] = acc.rate();
  }
  for (const auto& [role, acc] : headfixed_by_role) {
    report.headfixed_share_by_role[role] = acc.rate();
  }
  return report;
}

std::string serialize_analysis(const AnalysisReport& report) {
  detail::Json doc{
      {"report_version", 1},
      {"final_choice_count", report.final_choice_count},
      {"visible_rate", report.visible_rate},
      {"visible_rate_by_context", detail::map_to_json(report.visible_rate_by_context)},
      {"for_share_among_visible", detail::map_to_json(report.for_share_among_visible)},
      {"mean_scale_by_for", detail::map_to_json(report.mean_scale_by_for)},
      {"mean_opacity_by_for", detail::map_to_json(report.mean_opacity_by_for)},
      {"mean_opacity_by_sector", detail::map_to_json(report.mean_opacity_by_sector)},
      {"visible_rate_by_role", detail::map_to_json(report.visible_rate_by_role)},
      {"headfixed_share_by_role", detail::map_to_json(report.headfixed_share_by_role)},
      {"domain_violations", report.domain_violations},
  };
  return doc.dump(2) + "\n";
}

namespace {

std::string percent(double v) {
  const double rounded = std::round(v * 1000.0) / 10.0;
  std::string s = format_double(rounded);
  return s + "%";
}

void render_rate_map(std::ostringstream& out, const char* title,
                     const std::map<std::string, double>& m) {
  out << title << "\n";
  for (const auto& [k, v] : m) {
    out << "  " << k << ": " << percent(v) << "\n";
  }
}

void render_mean_map(std::ostringstream& out, const char* title,
                     const std::map<std::string, double>& m) {
  out << title << "\n";
  for (const auto& [k, v] : m) {
    out << "  " << k << ": " << format_double(std::round(v * 1000.0) / 1000.0) << "\n";
  }
}

}  // namespace

std::string render_analysis(const AnalysisReport& report) {
  std::ostringstream out;
  out << "final choices: " << report.final_choice_count << "\n";
  out << "visible overall: " << percent(report.visible_rate) << "\n";
  render_rate_map(out, "visible by context:", report.visible_rate_by_context);
  render_rate_map(out, "FoR share among visible:", report.for_share_among_visible);
  render_mean_map(out, "mean scale by FoR:", report.mean_scale_by_for);
  render_mean_map(out, "mean opacity by FoR:", report.mean_opacity_by_for);
  render_mean_map(out, "mean opacity by body-fixed sector:", report.mean_opacity_by_sector);
  render_rate_map(out, "visible by app role:", report.visible_rate_by_role);
  render_rate_map(out, "head-fixed share by app role:", report.headfixed_share_by_role);
  out << "domain violations: " << report.domain_violations << "\n";
  return out.str();
}

}  // namespace iar::harness

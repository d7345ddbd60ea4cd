#include <algorithm>
#include <cmath>
#include <random>

#include "iar/error.hpp"
#include "iar/harness.hpp"
#include "json_util.hpp"

namespace iar::harness {

StudyScenario study_scenario() {
  StudyScenario scenario;
  scenario.contexts = {
      {"C1", "LocateBook1", "Mobile", "Unconfined"},
      {"C2", "LocateBook1", "Mobile", "Confined"},
      {"C3", "LocateBook1", "Stationary", "Confined"},
      {"C4", "LocateBook2", "Mobile", "Unconfined"},
      {"C5", "LocateBook2", "Mobile", "Confined"},
      {"C6", "LocateBook2", "Stationary", "Confined"},
      {"C7", "LocateFriend", "Mobile", "Unconfined"},
      {"C8", "Read", "Stationary", "Unconfined"},
  };
  scenario.apps = rules::study_role_table().apps;
  for (const auto& app : scenario.apps) {
    scenario.default_state.entities[app] = {
        {"visibility", Value::categorical("Visible")},
        {"frame_of_reference", Value::categorical("BodyFixed")},
        {"position_sector", Value::categorical("Center")},
        {"scale", Value::number(1.0)},
        {"opacity", Value::number(1.0)},
    };
  }
  return scenario;
}

MarginalsConfig study_marginals() {
  MarginalsConfig config;
  config.visible_rate_by_context = {
      {"C1", 0.91}, {"C2", 0.91}, {"C3", 0.91}, {"C4", 0.82},
      {"C5", 0.82}, {"C6", 0.82}, {"C7", 0.73}, {"C8", 0.61},
  };
  config.body_sector_weights = {
      {"Center", 0.30},      {"LeftCenter", 0.12},   {"RightCenter", 0.12},
      {"TopCenter", 0.10},   {"BottomCenter", 0.08}, {"TopLeft", 0.06},
      {"TopRight", 0.06},    {"BottomLeft", 0.05},   {"BottomRight", 0.05},
      {"FarLeft", 0.03},     {"FarRight", 0.03},
  };
  config.head_sector_weights = {
      {"Center", 0.75},     {"TopLeft", 0.15},     {"TopCenter", 0.03},
      {"LeftCenter", 0.03}, {"RightCenter", 0.02}, {"TopRight", 0.01},
      {"BottomLeft", 0.005}, {"BottomCenter", 0.005},
  };
  return config;
}

// --- Marginals JSON ------------------------------------------------------------

namespace {

using detail::Json;

Json value_model_to_json(const MarginalsConfig::ValueModel& m) {
  return Json{{"spike_at_one", m.spike_at_one}, {"mean", m.mean}, {"sd", m.sd}};
}

MarginalsConfig::ValueModel value_model_from_json(const Json& j, const std::string& where) {
  MarginalsConfig::ValueModel m;
  m.spike_at_one = detail::require_number(j, "spike_at_one", where);
  m.mean = detail::require_number(j, "mean", where);
  m.sd = detail::require_number(j, "sd", where);
  return m;
}

std::map<std::string, double> weight_map_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::ParseError, where + ": expected object");
  }
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) {
      throw Error(ErrorKind::ParseError, where + "." + k + ": expected number");
    }
    out[k] = v.get<double>();
  }
  return out;
}

}  // namespace

MarginalsConfig parse_marginals(const std::string& json_text) {
  const Json doc = detail::parse_json(json_text, "marginals");
  MarginalsConfig config;
  config.name = detail::require_string(doc, "name", "marginals");
  config.participants = static_cast<int>(detail::require_number(doc, "participants", "marginals"));
  if (config.participants <= 0) {
    throw Error(ErrorKind::ParseError, "marginals.participants must be positive");
  }
  config.visible_rate_by_context =
      weight_map_from_json(detail::require(doc, "visible_rate", "marginals"),
                           "marginals.visible_rate");
  const Json& shares = detail::require(doc, "for_shares", "marginals");
  config.body_share = detail::require_number(shares, "BodyFixed", "marginals.for_shares");
  config.head_share = detail::require_number(shares, "HeadFixed", "marginals.for_shares");
  config.world_share = detail::require_number(shares, "WorldFixed", "marginals.for_shares");
  const Json& body = detail::require(doc, "body_fixed", "marginals");
  config.body_opacity = value_model_from_json(detail::require(body, "opacity", "marginals.body_fixed"),
                                              "marginals.body_fixed.opacity");
  config.body_scale = value_model_from_json(detail::require(body, "scale", "marginals.body_fixed"),
                                            "marginals.body_fixed.scale");
  config.body_sector_weights = weight_map_from_json(
      detail::require(body, "sector_weights", "marginals.body_fixed"),
      "marginals.body_fixed.sector_weights");
  const Json& head = detail::require(doc, "head_fixed", "marginals");
  config.head_opacity = value_model_from_json(detail::require(head, "opacity", "marginals.head_fixed"),
                                              "marginals.head_fixed.opacity");
  config.head_scale = value_model_from_json(detail::require(head, "scale", "marginals.head_fixed"),
                                            "marginals.head_fixed.scale");
  config.head_sector_weights = weight_map_from_json(
      detail::require(head, "sector_weights", "marginals.head_fixed"),
      "marginals.head_fixed.sector_weights");
  if (doc.contains("tweak_rates")) {
    const Json& tweaks = doc["tweak_rates"];
    config.sector_tweak_rate = tweaks.value("sector", config.sector_tweak_rate);
    config.value_tweak_rate = tweaks.value("value", config.value_tweak_rate);
  }
  return config;
}

MarginalsConfig load_marginals_file(const std::filesystem::path& path) {
  return parse_marginals(detail::read_file(path));
}

std::string serialize_marginals(const MarginalsConfig& config) {
  Json doc{
      {"marginals_version", 1},
      {"name", config.name},
      {"participants", config.participants},
      {"visible_rate", detail::map_to_json(config.visible_rate_by_context)},
      {"for_shares",
       Json{{"BodyFixed", config.body_share},
            {"HeadFixed", config.head_share},
            {"WorldFixed", config.world_share}}},
      {"body_fixed",
       Json{{"opacity", value_model_to_json(config.body_opacity)},
            {"scale", value_model_to_json(config.body_scale)},
            {"sector_weights", detail::map_to_json(config.body_sector_weights)}}},
      {"head_fixed",
       Json{{"opacity", value_model_to_json(config.head_opacity)},
            {"scale", value_model_to_json(config.head_scale)},
            {"sector_weights", detail::map_to_json(config.head_sector_weights)}}},
      {"tweak_rates",
       Json{{"sector", config.sector_tweak_rate}, {"value", config.value_tweak_rate}}},
  };
  return doc.dump(2) + "\n";
}

// --- Generator -------------------------------------------------------------------

namespace {

std::string participant_name(int index) {
  std::string n = std::to_string(index + 1);
  if (n.size() < 2) n = "0" + n;
  return "P" + n;
}

// Slot identifies one (participant, app) cell within a context.
struct Slot {
  int participant;
  std::string app;
};

double clamp_round(double v, double lo, double hi) {
  v = std::min(std::max(v, lo), hi);
  return std::round(v * 100.0) / 100.0;
}

double sample_value(const MarginalsConfig::ValueModel& model, double lo, double hi,
                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (uniform(rng) < model.spike_at_one) return 1.0;
  std::normal_distribution<double> normal(model.mean, model.sd);
  return clamp_round(normal(rng), lo, hi);
}

std::string sample_weighted(const std::map<std::string, double>& weights,
                            std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& [_, w] : weights) total += w;
  std::uniform_real_distribution<double> uniform(0.0, total);
  double r = uniform(rng);
  for (const auto& [label, w] : weights) {
    r -= w;
    if (r <= 0.0) return label;
  }
  return weights.rbegin()->first;
}

}  // namespace

std::vector<TraceEvent> synth_trace(std::uint64_t seed, const MarginalsConfig& config) {
  const StudyScenario scenario = study_scenario();
  const rules::RoleTable roles = rules::study_role_table();
  std::mt19937_64 rng(seed);

  const int participants = config.participants;
  const std::size_t apps_per_context = scenario.apps.size();

  // Roles per context.
  std::map<std::string, std::map<std::string, std::string>> role_of;  // context -> app -> role
  for (const auto& context : scenario.contexts) {
    Context ctx;
    ctx.entries[rules::kObjectiveComponent] = Value::categorical(context.objective);
    ctx.entries[rules::kMobilityComponent] = Value::categorical(context.mobility);
    ctx.entries[rules::kConfinementComponent] = Value::categorical(context.confinement);
    for (const auto& [component, value] : rules::derive_app_roles(ctx, roles)) {
      for (const auto& app : scenario.apps) {
        if (component == rules::app_role_component(app)) {
          role_of[context.label][app] = value.as_categorical();
        }
      }
    }
  }

  // Visibility by quota: exactly round((1 - rate) * slots) minimized per
  // context, drawn from the irrelevant apps only (relevant apps are never
  // minimized in the study data).
  std::map<std::string, std::map<int, std::map<std::string, bool>>> minimized;
  for (const auto& context : scenario.contexts) {
    auto it = config.visible_rate_by_context.find(context.label);
    if (it == config.visible_rate_by_context.end()) {
      throw Error(ErrorKind::ConfigError, "marginals missing visible rate for " + context.label);
    }
    const double rate = it->second;
    const auto total_slots = static_cast<double>(participants) * apps_per_context;
    std::size_t quota = static_cast<std::size_t>(std::llround((1.0 - rate) * total_slots));

    std::vector<Slot> candidates;
    for (int p = 0; p < participants; ++p) {
      for (const auto& app : scenario.apps) {
        if (role_of[context.label][app] == "Irrelevant") {
          candidates.push_back({p, app});
        }
      }
    }
    quota = std::min(quota, candidates.size());
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (std::size_t i = 0; i < quota; ++i) {
      minimized[context.label][candidates[i].participant][candidates[i].app] = true;
    }
  }

  // Participants keep a design per app and rarely rework it between contexts,
  // so each (participant, app) pair gets one sticky base design. The frame of
  // reference is filled by quota, weighted by how often the pair is visible,
  // which pins the share among visible apps to the configured split.
  struct Pair {
    int participant;
    std::string app;
    std::size_t visible_count = 0;
  };
  std::vector<Pair> pairs;
  std::size_t visible_total = 0;
  for (int p = 0; p < participants; ++p) {
    for (const auto& app : scenario.apps) {
      Pair pair{p, app, 0};
      for (const auto& context : scenario.contexts) {
        if (!minimized[context.label][p][app]) ++pair.visible_count;
      }
      visible_total += pair.visible_count;
      pairs.push_back(std::move(pair));
    }
  }
  const auto world_quota = static_cast<std::size_t>(
      std::llround(config.world_share * static_cast<double>(visible_total)));
  const auto head_quota = static_cast<std::size_t>(
      std::llround(config.head_share * static_cast<double>(visible_total)));
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::map<std::pair<int, std::string>, std::string> frame_of;
  std::size_t world_filled = 0;
  std::size_t head_filled = 0;
  for (const auto& pair : pairs) {
    std::string frame = "BodyFixed";
    if (world_filled + pair.visible_count <= world_quota) {
      frame = "WorldFixed";
      world_filled += pair.visible_count;
    } else if (head_filled + pair.visible_count <= head_quota) {
      frame = "HeadFixed";
      head_filled += pair.visible_count;
    }
    frame_of[{pair.participant, pair.app}] = frame;
  }

  auto sample_design = [&](const std::string& frame, DesignVector& design) {
    const bool head = frame == "HeadFixed";
    design["visibility"] = Value::categorical("Visible");
    design["frame_of_reference"] = Value::categorical(frame);
    design["position_sector"] = Value::categorical(sample_weighted(
        head ? config.head_sector_weights : config.body_sector_weights, rng));
    design["scale"] = Value::number(
        sample_value(head ? config.head_scale : config.body_scale, 0.25, 1.5, rng));
    design["opacity"] = Value::number(
        sample_value(head ? config.head_opacity : config.body_opacity, 0.15, 1.0, rng));
  };

  std::map<std::pair<int, std::string>, DesignVector> base_design;
  for (int p = 0; p < participants; ++p) {
    for (const auto& app : scenario.apps) {
      DesignVector design;
      sample_design(frame_of.at({p, app}), design);
      base_design[{p, app}] = std::move(design);
    }
  }

  // Occasional per-context reworks of a single dimension; the new value
  // becomes the pair's design going forward.
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  static constexpr const char* kDimensionOrder[] = {
      "visibility", "frame_of_reference", "position_sector", "scale", "opacity"};

  std::vector<TraceEvent> events;
  for (int p = 0; p < participants; ++p) {
    adapt::InterfaceState state = scenario.default_state;
    std::int64_t ts = 0;
    for (std::size_t c = 0; c < scenario.contexts.size(); ++c) {
      const auto& label = scenario.contexts[c].label;
      ts = static_cast<std::int64_t>(p) * 1000000 + static_cast<std::int64_t>(c) * 10000;
      for (const auto& app : scenario.apps) {
        auto& current = state.entities.at(app);
        if (minimized[label][p][app]) {
          // Minimizing leaves the other dimensions alone; the app keeps its
          // previous design for when it is reopened.
          const Value minimized_value = Value::categorical("Minimized");
          if (current.at("visibility") != minimized_value) {
            events.push_back({ts += 10, participant_name(p), label, app, "visibility",
                              minimized_value});
            current["visibility"] = minimized_value;
          }
          continue;
        }
        DesignVector& desired = base_design.at({p, app});
        if (c > 0) {
          const std::string& frame = frame_of.at({p, app});
          const bool head = frame == "HeadFixed";
          if (uniform(rng) < config.sector_tweak_rate) {
            desired["position_sector"] = Value::categorical(sample_weighted(
                head ? config.head_sector_weights : config.body_sector_weights, rng));
          }
          if (uniform(rng) < config.value_tweak_rate) {
            desired["scale"] = Value::number(
                sample_value(head ? config.head_scale : config.body_scale, 0.25, 1.5, rng));
          }
          if (uniform(rng) < config.value_tweak_rate) {
            desired["opacity"] = Value::number(
                sample_value(head ? config.head_opacity : config.body_opacity, 0.15, 1.0, rng));
          }
        }
        for (const char* dimension : kDimensionOrder) {
          const Value& value = desired.at(dimension);
          if (current.at(dimension) != value) {
            events.push_back({ts += 10, participant_name(p), label, app, dimension, value});
            current[dimension] = value;
          }
        }
      }
    }
  }
  return events;
}

}  // namespace iar::harness

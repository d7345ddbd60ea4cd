#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "iar/error.hpp"
#include "iar/harness.hpp"
#include "test_support.hpp"

using namespace iar;
using namespace iar::harness;

namespace {

const std::vector<TraceEvent>& fixture_trace() {
  static const std::vector<TraceEvent> trace = synth_trace(1, study_marginals());
  return trace;
}

std::string engine_choice(const ReplayReport& report, const std::string& context,
                          const std::string& app, const std::string& dimension) {
  for (const auto& cell : report.cells) {
    if (cell.context_label == context && cell.app == app && cell.dimension == dimension) {
      return cell.engine_choice;
    }
  }
  FAIL("missing cell ", context, "/", app, "/", dimension);
  return {};
}

}  // namespace

TEST_CASE("the study scenario defines eight contexts over five apps") {
  const auto scenario = study_scenario();
  REQUIRE(scenario.contexts.size() == 8);
  CHECK(scenario.contexts.front().label == "C1");
  CHECK(scenario.contexts.back().label == "C8");
  CHECK(scenario.contexts.back().objective == "Read");
  CHECK(scenario.apps.size() == 5);
  CHECK(scenario.default_state.entities.size() == 5);
  for (const auto& c : scenario.contexts) {
    CHECK_FALSE(c.objective.empty());
    CHECK_FALSE(c.mobility.empty());
    CHECK_FALSE(c.confinement.empty());
  }
}

TEST_CASE("ingest_trace validates the schema with row precision") {
  SUBCASE("empty file with header parses to an empty list") {
    CHECK(ingest_trace("timestamp_ms,participant,context,app,dimension,value\n").empty());
  }

  SUBCASE("opacity below the 0.15 floor is rejected") {
    const std::string csv =
        "timestamp_ms,participant,context,app,dimension,value\n"
        "10,P01,C1,Map,opacity,0.05\n";
    try {
      ingest_trace(csv);
      FAIL("expected SchemaError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SchemaError);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }

  SUBCASE("unknown context label is rejected") {
    const std::string csv =
        "timestamp_ms,participant,context,app,dimension,value\n"
        "10,P01,C9,Map,opacity,0.5\n";
    CHECK_THROWS_AS(ingest_trace(csv), Error);
  }

  SUBCASE("unknown app is rejected") {
    const std::string csv =
        "timestamp_ms,participant,context,app,dimension,value\n"
        "10,P01,C1,Calculator,opacity,0.5\n";
    CHECK_THROWS_AS(ingest_trace(csv), Error);
  }

  SUBCASE("rows come back timestamp-sorted") {
    const std::string csv =
        "timestamp_ms,participant,context,app,dimension,value\n"
        "20,P01,C1,Map,opacity,0.5\n"
        "10,P01,C1,Map,opacity,0.9\n";
    const auto events = ingest_trace(csv);
    REQUIRE(events.size() == 2);
    CHECK(events[0].timestamp_ms == 10);
    CHECK(events[1].timestamp_ms == 20);
  }
}

TEST_CASE("final_choices: last write wins, untouched apps inherit") {
  const std::string csv =
      "timestamp_ms,participant,context,app,dimension,value\n"
      "10,P01,C1,Map,opacity,0.5\n"
      "30,P01,C3,Map,opacity,0.6\n"
      "40,P01,C3,Map,opacity,0.7\n"
      "50,P01,C4,Book1,visibility,Minimized\n";
  const auto finals = final_choices(ingest_trace(csv));

  // Two opacity writes in C3: the later one survives.
  CHECK(finals.at({"P01", "C3", "Map"}).at("opacity") == Value::number(0.7));
  // C2 untouched: Map keeps its C1 design.
  CHECK(finals.at({"P01", "C2", "Map"}).at("opacity") == Value::number(0.5));
  // Minimized app retains its other dimensions for restoring.
  const auto& book1_c4 = finals.at({"P01", "C4", "Book1"});
  CHECK(book1_c4.at("visibility") == Value::categorical("Minimized"));
  CHECK(book1_c4.at("scale") == Value::number(1.0));
  CHECK(book1_c4.at("frame_of_reference") == Value::categorical("BodyFixed"));
  // And stays minimized until reopened.
  CHECK(finals.at({"P01", "C8", "Book1"}).at("visibility") ==
        Value::categorical("Minimized"));

  // One participant, 8 contexts, 5 apps.
  CHECK(finals.size() == 40);
}

TEST_CASE("synth_trace is deterministic and meets its marginals") {
  const auto& trace = fixture_trace();

  SUBCASE("same seed, same trace; different seed, different trace") {
    CHECK(synth_trace(1, study_marginals()) == trace);
    CHECK(synth_trace(2, study_marginals()) != trace);
  }

  SUBCASE("the fixture covers 20 participants x 8 contexts x 5 apps") {
    CHECK(final_choices(trace).size() == 800);
  }

  SUBCASE("per-context visibility lands on the configured table") {
    const auto report = analyze(trace);
    const auto& config = study_marginals();
    for (const auto& [context, rate] : config.visible_rate_by_context) {
      CHECK(report.visible_rate_by_context.at(context) ==
            doctest::Approx(rate).epsilon(0.03));
    }
    CHECK(report.visible_rate == doctest::Approx(0.825).epsilon(0.04));
  }

  SUBCASE("frame shares among visible apps match the quotas") {
    const auto report = analyze(trace);
    CHECK(report.for_share_among_visible.at("BodyFixed") == doctest::Approx(0.90).epsilon(0.034));
    CHECK(report.for_share_among_visible.at("HeadFixed") > 0.0);
    CHECK(report.for_share_among_visible.at("WorldFixed") < 0.03);
  }

  SUBCASE("a degenerate config with full visibility emits no minimize events") {
    MarginalsConfig config = study_marginals();
    for (auto& [_, rate] : config.visible_rate_by_context) rate = 1.0;
    for (const auto& event : synth_trace(3, config)) {
      CHECK(event.value != Value::categorical("Minimized"));
    }
  }

  SUBCASE("relevant apps are never minimized in the fixture") {
    const auto report = analyze(trace);
    CHECK(report.visible_rate_by_role.at("Primary") == 1.0);
    CHECK(report.visible_rate_by_role.at("Assistive") == 1.0);
  }
}

TEST_CASE("analyze handles degenerate traces") {
  SUBCASE("everything minimized") {
    std::string csv = "timestamp_ms,participant,context,app,dimension,value\n";
    int ts = 0;
    for (const auto& context : study_scenario().contexts) {
      for (const auto& app : study_scenario().apps) {
        csv += std::to_string(++ts) + ",P01," + context.label + "," + app +
               ",visibility,Minimized\n";
      }
    }
    const auto report = analyze(ingest_trace(csv));
    CHECK(report.visible_rate == 0.0);
  }

  SUBCASE("no events at all: everyone keeps the default design") {
    const auto report = analyze({});
    CHECK(report.final_choice_count == 0);
    CHECK(report.visible_rate == 0.0);
  }
}

TEST_CASE("traces round-trip through CSV") {
  const auto& trace = fixture_trace();
  const std::string csv = serialize_trace(trace, {"fixture round-trip"});
  CHECK(ingest_trace(csv) == trace);
}

TEST_CASE("marginals config round-trips and matches the bundled file") {
  const auto bundled = load_marginals_file(test::data_path("study_marginals_v1.json"));
  const auto builtin = study_marginals();
  CHECK(bundled.participants == builtin.participants);
  CHECK(bundled.visible_rate_by_context == builtin.visible_rate_by_context);
  CHECK(bundled.body_share == builtin.body_share);
  CHECK(bundled.body_sector_weights == builtin.body_sector_weights);
  const auto reparsed = parse_marginals(serialize_marginals(bundled));
  CHECK(reparsed.visible_rate_by_context == bundled.visible_rate_by_context);
}

TEST_CASE("replay with the study pack enforces the visibility patterns") {
  const auto scenario = study_scenario();
  const auto registry = rules::study_registry();
  const auto rulebase =
      rules::load_rulepack_file(test::data_path("study_library_v1.json"), registry);
  const ReplayConfig config;

  const auto report = replay(scenario, rulebase, nullptr, fixture_trace(), config);

  SUBCASE("C8 minimizes the four non-stock apps, stock stays visible") {
    for (const auto& app : {"Map", "Book1", "Book2", "Messaging"}) {
      CHECK(engine_choice(report, "C8", app, "visibility") == "Minimized");
    }
    CHECK(engine_choice(report, "C8", "Stock", "visibility") == "Visible");
  }

  SUBCASE("stock is never minimized in any context") {
    for (const auto& context : scenario.contexts) {
      CHECK(engine_choice(report, context.label, "Stock", "visibility") == "Visible");
    }
  }

  SUBCASE("agreement rates are populated") {
    CHECK(report.agreement_overall > 0.0);
    CHECK(report.agreement_by_dimension.size() == 5);
    CHECK(report.agreement_by_context.size() == 8);
    CHECK(report.cells.size() == 8 * 5 * 5);
    CHECK(report.churn > 0);
  }
}

TEST_CASE("replay with empty inputs agrees exactly on default-equal states") {
  const auto scenario = study_scenario();
  rules::RuleBase empty_rules;
  empty_rules.dimensions = rules::study_dimensions();
  const ReplayConfig config;

  const auto report = replay(scenario, empty_rules, nullptr, fixture_trace(), config);

  // Independent oracle: compare every trace final against the default state
  // with the same agreement rule (numeric tolerance 0.05).
  const auto finals = final_choices(fixture_trace(), scenario);
  std::size_t agree = 0;
  std::size_t total = 0;
  for (const auto& [key, design] : finals) {
    const auto& app = std::get<2>(key);
    for (const auto& [dimension, value] : design) {
      const Value& default_value = scenario.default_state.entities.at(app).at(dimension);
      bool same = false;
      if (value.is_number() && default_value.is_number()) {
        same = std::abs(value.as_number().magnitude - default_value.as_number().magnitude) <=
               0.05 + 1e-12;
      } else {
        same = value == default_value;
      }
      agree += same ? 1 : 0;
      ++total;
    }
  }
  CHECK(report.agreement_overall ==
        doctest::Approx(static_cast<double>(agree) / total).epsilon(1e-12));
  CHECK(report.churn == 0);
}

TEST_CASE("replay reports are byte-identical across runs") {
  const auto scenario = study_scenario();
  const auto registry = rules::study_registry();
  const auto rulebase =
      rules::load_rulepack_file(test::data_path("study_library_v1.json"), registry);
  const ReplayConfig config;

  learner::PersonalModel model_a;
  learner::PersonalModel model_b;
  const auto report_a = replay(scenario, rulebase, &model_a, fixture_trace(), config);
  const auto report_b = replay(scenario, rulebase, &model_b, fixture_trace(), config);
  CHECK(serialize_replay_report(report_a) == serialize_replay_report(report_b));
  CHECK(learner::serialize_model(model_a) == learner::serialize_model(model_b));
}

TEST_CASE("a trained model does not hurt replay agreement") {
  const auto scenario = study_scenario();
  const auto registry = rules::study_registry();
  const auto rulebase =
      rules::load_rulepack_file(test::data_path("study_library_v1.json"), registry);
  const ReplayConfig config;

  learner::PersonalModel model;
  const auto first = replay(scenario, rulebase, &model, fixture_trace(), config);
  const auto second = replay(scenario, rulebase, &model, fixture_trace(), config);
  CHECK(second.agreement_overall >= first.agreement_overall);
}

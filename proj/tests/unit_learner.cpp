#include <doctest.h>

#include <cmath>
#include <random>

#include "iar/learner.hpp"
#include "iar/rules.hpp"
#include "test_support.hpp"

using namespace iar;
using namespace iar::learner;
using iar::rules::Adaptation;

namespace {

Context c1_context() {
  Context ctx;
  ctx.entries[rules::kObjectiveComponent] = Value::categorical("LocateBook1");
  ctx.entries[rules::kMobilityComponent] = Value::categorical("Mobile");
  ctx.entries[rules::kConfinementComponent] = Value::categorical("Unconfined");
  ctx.entries["sui.app_role.stock"] = Value::categorical("Primary");  // outside signature
  return ctx;
}

adapt::AdaptationPlan plan_of(std::vector<Adaptation> adaptations) {
  adapt::AdaptationPlan plan;
  adapt::ConsolidatedInference c;
  c.adaptations = std::move(adaptations);
  c.impact = 0.5;
  c.key = adapt::bundle_key(c.adaptations);
  plan.selected = {std::move(c)};
  plan.total_impact = 0.5;
  return plan;
}

FeedbackEvent accept_event(const Adaptation& adaptation) {
  return {c1_context(), plan_of({adaptation}), {}, 0};
}

FeedbackEvent override_event(const Adaptation& automatic, const Adaptation& manual) {
  return {c1_context(), plan_of({automatic}), {manual}, 0};
}

double impact_of(const PersonalModel& model, const Context& ctx, const LearnerConfig& config,
                 const std::string& dimension, const Value& value, const std::string& target) {
  for (const auto& inference : infer_personal(model, ctx, config)) {
    const auto& a = inference.adaptations.front();
    if (a.dimension == dimension && a.value == value && a.targets.front() == target) {
      return inference.impact;
    }
  }
  return 0.0;
}

}  // namespace

TEST_CASE("signature projects onto the configured components") {
  LearnerConfig config;
  const auto sig = signature(c1_context(), config);
  CHECK(sig.key() ==
        "setting.env.confinement=Unconfined|user.state.mobility=Mobile|"
        "user.state.rw_objective=LocateBook1");

  SUBCASE("empty signature set yields the global signature") {
    config.signature_components.clear();
    CHECK(signature(c1_context(), config).key().empty());
  }

  SUBCASE("components outside the set do not matter") {
    Context other = c1_context();
    other.entries["sui.app_role.stock"] = Value::categorical("Irrelevant");
    CHECK(signature(other, config) == signature(c1_context(), config));
  }

  SUBCASE("missing components are omitted") {
    Context partial;
    partial.entries[rules::kMobilityComponent] = Value::categorical("Mobile");
    CHECK(signature(partial, config).key() == "user.state.mobility=Mobile");
  }
}

TEST_CASE("numeric values quantize to the bin grid") {
  LearnerConfig config;
  config.numeric_bin_width = 0.05;
  CHECK(quantize(Value::number(0.83), config) == Value::number(0.85));
  CHECK(quantize(Value::number(0.82), config) == Value::number(0.05 * 16));
  CHECK(quantize(Value::categorical("Visible"), config) == Value::categorical("Visible"));
}

TEST_CASE("observe: accepts reinforce, overrides penalize, manual earns credit") {
  const LearnerConfig config;
  const Adaptation opaque{"opacity", Value::number(1.0), {"Map"}};
  const Adaptation head_fixed{"frame_of_reference", Value::categorical("HeadFixed"), {"Map"}};
  const Adaptation body_fixed{"frame_of_reference", Value::categorical("BodyFixed"), {"Map"}};

  SUBCASE("kept automatic adaptation moves toward +1") {
    PersonalModel model;
    for (int i = 0; i < 10; ++i) observe(model, accept_event(opaque), config);
    const auto& slot = model.estimators.at("opacity")
                           .by_signature.begin()
                           ->second.begin()
                           ->second;
    CHECK(slot.count == 10);
    CHECK(slot.ema == doctest::Approx(1.0 - std::pow(0.8, 10)));
  }

  SUBCASE("an override pushes the automatic key down and the manual key up") {
    PersonalModel model;
    for (int i = 0; i < 10; ++i) observe(model, override_event(head_fixed, body_fixed), config);
    CHECK(impact_of(model, c1_context(), config, "frame_of_reference",
                    Value::categorical("HeadFixed"), "Map") < 0.0);
    CHECK(impact_of(model, c1_context(), config, "frame_of_reference",
                    Value::categorical("BodyFixed"), "Map") > 0.0);
  }

  SUBCASE("manual-only adaptation earns credit") {
    PersonalModel model;
    const Adaptation minimize{"visibility", Value::categorical("Minimized"), {"Map"}};
    for (int i = 0; i < 5; ++i) {
      observe(model, {c1_context(), adapt::AdaptationPlan{}, {minimize}, 0}, config);
    }
    CHECK(impact_of(model, c1_context(), config, "visibility",
                    Value::categorical("Minimized"), "Map") > 0.0);
  }

  SUBCASE("inverted polarity swaps the signs") {
    LearnerConfig literal = config;
    literal.invert_feedback_polarity = true;
    PersonalModel model;
    for (int i = 0; i < 10; ++i) observe(model, override_event(head_fixed, body_fixed), literal);
    CHECK(impact_of(model, c1_context(), literal, "frame_of_reference",
                    Value::categorical("HeadFixed"), "Map") > 0.0);
    CHECK(impact_of(model, c1_context(), literal, "frame_of_reference",
                    Value::categorical("BodyFixed"), "Map") < 0.0);
  }

  SUBCASE("a multi-target automatic adaptation learns per target") {
    PersonalModel model;
    const Adaptation both{"opacity", Value::number(1.0), {"Map", "Stock"}};
    const Adaptation manual_map{"opacity", Value::number(0.5), {"Map"}};
    for (int i = 0; i < 10; ++i) {
      observe(model, {c1_context(), plan_of({both}), {manual_map}, 0}, config);
    }
    CHECK(impact_of(model, c1_context(), config, "opacity", Value::number(1.0), "Map") < 0.0);
    CHECK(impact_of(model, c1_context(), config, "opacity", Value::number(1.0), "Stock") > 0.0);
  }
}

TEST_CASE("infer_personal applies support and shrinkage") {
  const LearnerConfig config;  // min_support 3, k = 1
  const Adaptation opaque{"opacity", Value::number(1.0), {"Map"}};

  SUBCASE("unseen signature yields nothing") {
    PersonalModel model;
    observe(model, accept_event(opaque), config);
    Context unseen;
    unseen.entries[rules::kMobilityComponent] = Value::categorical("Stationary");
    CHECK(infer_personal(model, unseen, config).empty());
  }

  SUBCASE("below min_support yields nothing") {
    PersonalModel model;
    observe(model, accept_event(opaque), config);
    observe(model, accept_event(opaque), config);
    CHECK(infer_personal(model, c1_context(), config).empty());
  }

  SUBCASE("ema 1.0 with count 9 and k 1 shrinks to exactly 0.9") {
    PersonalModel model;
    const std::string sig = signature(c1_context(), config).key();
    model.estimators["opacity"].by_signature[sig]["opacity=1@Map"] = {opaque, 1.0, 9};
    const auto inferences = infer_personal(model, c1_context(), config);
    REQUIRE(inferences.size() == 1);
    CHECK(inferences[0].impact == doctest::Approx(0.9));
    CHECK(inferences[0].source.kind == rules::SourceKind::Personalized);
  }

  SUBCASE("alternating accept/override lands near zero") {
    PersonalModel model;
    const Adaptation other{"opacity", Value::number(0.5), {"Map"}};
    for (int i = 0; i < 100; ++i) {
      if (i % 2 == 0) {
        observe(model, accept_event(opaque), config);
      } else {
        observe(model, override_event(opaque, other), config);
      }
    }
    // The EMA recurrence oscillates around +-1/9 for alpha 0.2.
    const double impact =
        impact_of(model, c1_context(), config, "opacity", Value::number(1.0), "Map");
    CHECK(std::abs(impact) < 0.15);
  }
}

TEST_CASE("learned impacts stay within [-1, 1] and models replay bit-identically") {
  const LearnerConfig config;
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> pick(0, 2);
  const std::vector<Adaptation> pool = {
      {"opacity", Value::number(1.0), {"Map"}},
      {"opacity", Value::number(0.5), {"Map"}},
      {"scale", Value::number(0.8), {"Stock"}},
  };

  PersonalModel a;
  PersonalModel b;
  std::vector<FeedbackEvent> events;
  for (int i = 0; i < 200; ++i) {
    const auto& automatic = pool[pick(rng)];
    FeedbackEvent event = coin(rng) ? accept_event(automatic)
                                    : override_event(automatic, pool[pick(rng)]);
    events.push_back(event);
  }
  for (const auto& event : events) observe(a, event, config);
  for (const auto& event : events) observe(b, event, config);

  CHECK(serialize_model(a) == serialize_model(b));
  for (const auto& inference : infer_personal(a, c1_context(), config)) {
    CHECK(inference.impact >= -1.0);
    CHECK(inference.impact <= 1.0);
  }
}

TEST_CASE("checkpoints round-trip") {
  const LearnerConfig config;
  PersonalModel model;
  const Adaptation opaque{"opacity", Value::number(1.0), {"Map"}};
  for (int i = 0; i < 7; ++i) observe(model, accept_event(opaque), config);

  const std::string checkpoint = serialize_model(model);
  const PersonalModel restored = parse_model(checkpoint);
  CHECK(serialize_model(restored) == checkpoint);
  CHECK(infer_personal(restored, c1_context(), config).size() ==
        infer_personal(model, c1_context(), config).size());
}

TEST_CASE("universal table matches on exact components") {
  const auto dims = rules::study_dimensions();
  const auto table =
      load_universal_table_file(test::data_path("universal_demo_v1.json"), dims);

  Context stationary;
  stationary.entries[rules::kMobilityComponent] = Value::categorical("Stationary");
  const auto hits = infer_universal(table, stationary);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].source.kind == rules::SourceKind::Universal);
  CHECK(hits[0].impact == doctest::Approx(0.3));

  Context mobile;
  mobile.entries[rules::kMobilityComponent] = Value::categorical("Mobile");
  CHECK(infer_universal(table, mobile).empty());
}

#include <doctest.h>

#include <algorithm>
#include <random>

#include "iar/adapt.hpp"
#include "iar/error.hpp"
#include "test_support.hpp"

using namespace iar;
using namespace iar::adapt;
using iar::rules::Adaptation;
using iar::rules::Inference;
using iar::rules::Source;

namespace {

Inference make_inference(std::vector<Adaptation> adaptations, double impact, Source source) {
  return {std::move(adaptations), impact, std::move(source)};
}

InterfaceState two_app_state() {
  InterfaceState state;
  state.entities["WeatherApp"] = {{"opacity", Value::number(0.5)},
                                  {"position_sector", Value::categorical("Center")}};
  state.entities["ChatApp"] = {{"opacity", Value::number(0.5)},
                               {"position_sector", Value::categorical("Center")}};
  return state;
}

// Entities matching the random-candidate target pool, so the exhaustive
// oracle and the optimizer see the same conflict structure.
InterfaceState pool_state() {
  InterfaceState state;
  state.entities["Map"] = {};
  state.entities["Book1"] = {};
  state.entities["Stock"] = {};
  return state;
}

// The worked conversation instance: an opaque-and-move bundle, the losing
// opaque-alone consensus, and a transparent-everything rule that conflicts
// with the winner.
std::vector<Inference> social_inferences(double joint, double info_access, double social_cues,
                                         double transparent_all) {
  const Adaptation opaque{"opacity", Value::number(1.0), {"WeatherApp"}};
  const Adaptation move_up{"position_sector", Value::categorical("TopCenter"), {"WeatherApp"}};
  const Adaptation fade_all{"opacity", Value::number(0.0), {"*"}};
  return {
      make_inference({opaque}, social_cues, Source::rule("dp_social_cues")),
      make_inference({opaque, move_up}, joint, Source::rule("dp_social_cues")),
      make_inference({opaque}, info_access, Source::rule("dp_social_info_access")),
      make_inference({fade_all}, transparent_all, Source::rule("dp_rw_priority")),
  };
}

}  // namespace

TEST_CASE("consolidate: singletons pass through, groups take the weighted mean") {
  const SourceWeights weights;
  const Adaptation opaque{"opacity", Value::number(1.0), {"WeatherApp"}};

  SUBCASE("single inference keeps its impact") {
    const auto out = consolidate({make_inference({opaque}, 0.7, Source::rule("p"))}, weights);
    REQUIRE(out.size() == 1);
    CHECK(out[0].impact == doctest::Approx(0.7));
    CHECK(out[0].provenance.size() == 1);
  }

  SUBCASE("equal-weight mean of +0.8 and -0.4 is +0.2") {
    const auto out = consolidate({make_inference({opaque}, 0.8, Source::rule("a")),
                                  make_inference({opaque}, -0.4, Source::rule("b"))},
                                 weights);
    REQUIRE(out.size() == 1);
    CHECK(out[0].impact == doctest::Approx(0.2));
    CHECK(out[0].provenance.size() == 2);
  }

  SUBCASE("source weights skew the consensus") {
    SourceWeights skewed;
    skewed.universal = 0.5;
    const auto out = consolidate({make_inference({opaque}, 1.0, Source::rule("a")),
                                  make_inference({opaque}, 0.0, Source::universal())},
                                 skewed);
    REQUIRE(out.size() == 1);
    CHECK(out[0].impact == doctest::Approx(1.0 / 1.5));
  }

  SUBCASE("the opaque-alone group consolidates apart from the joint bundle") {
    const auto out = consolidate(social_inferences(0.7, 0.2, -0.6, 0.1), SourceWeights{});
    REQUIRE(out.size() == 3);
    // Sorted by bundle key; find by membership.
    int joint = -1, alone = -1, fade = -1;
    for (int i = 0; i < 3; ++i) {
      if (out[i].adaptations.size() == 2) joint = i;
      else if (out[i].adaptations[0].value == Value::number(0.0)) fade = i;
      else alone = i;
    }
    REQUIRE(joint >= 0);
    REQUIRE(alone >= 0);
    REQUIRE(fade >= 0);
    CHECK(out[joint].impact == doctest::Approx(0.7));
    CHECK(out[alone].impact == doctest::Approx(-0.2));  // (-0.6 + 0.2) / 2
    CHECK(out[fade].impact == doctest::Approx(0.1));
  }
}

TEST_CASE("consolidation is invariant under input permutation") {
  std::mt19937 rng(5);
  auto inferences = social_inferences(0.7, 0.2, -0.6, 0.1);
  inferences.push_back(make_inference({{"scale", Value::number(0.8), {"ChatApp"}}}, 0.3,
                                      Source::personalized()));
  const auto baseline = consolidate(inferences, SourceWeights{});
  for (int i = 0; i < 20; ++i) {
    std::shuffle(inferences.begin(), inferences.end(), rng);
    CHECK(consolidate(inferences, SourceWeights{}) == baseline);
  }
}

TEST_CASE("conflicts: same dimension, overlapping targets, different values") {
  auto consolidated = [](Adaptation a) {
    ConsolidatedInference c;
    c.adaptations = {std::move(a)};
    c.key = bundle_key(c.adaptations);
    return c;
  };

  const auto opaque_weather = consolidated({"opacity", Value::number(1.0), {"WeatherApp"}});
  const auto fade_all = consolidated({"opacity", Value::number(0.0), {"*"}});
  const auto scale_weather = consolidated({"scale", Value::number(0.5), {"WeatherApp"}});

  CHECK(conflicts(opaque_weather, fade_all));  // wildcard overlaps everything
  CHECK_FALSE(conflicts(opaque_weather, scale_weather));
  CHECK_FALSE(conflicts(opaque_weather, opaque_weather));  // equal values agree
  const auto opaque_chat = consolidated({"opacity", Value::number(1.0), {"ChatApp"}});
  CHECK_FALSE(conflicts(opaque_weather, opaque_chat));  // disjoint targets
}

TEST_CASE("optimize solves the worked conversation instance") {
  const auto candidates = consolidate(social_inferences(0.7, 0.2, -0.6, 0.1), SourceWeights{});
  const auto plan = optimize(candidates, two_app_state());
  REQUIRE(plan.selected.size() == 1);
  CHECK(plan.selected[0].adaptations.size() == 2);  // opaque + move, atomically
  CHECK(plan.total_impact == doctest::Approx(0.7));
}

TEST_CASE("optimize basics") {
  SUBCASE("no candidates, empty plan") {
    const auto plan = optimize({}, two_app_state());
    CHECK(plan.selected.empty());
    CHECK(plan.total_impact == 0.0);
  }

  SUBCASE("two non-conflicting positives are both selected") {
    const auto candidates =
        consolidate({make_inference({{"opacity", Value::number(1.0), {"WeatherApp"}}}, 0.4,
                                    Source::rule("a")),
                     make_inference({{"scale", Value::number(0.5), {"WeatherApp"}}}, 0.3,
                                    Source::rule("b"))},
                    SourceWeights{});
    const auto plan = optimize(candidates, two_app_state());
    CHECK(plan.selected.size() == 2);
    CHECK(plan.total_impact == doctest::Approx(0.7));
  }

  SUBCASE("wildcard targets expand to the state's entities") {
    const auto candidates = consolidate(
        {make_inference({{"opacity", Value::number(1.0), {"*"}}}, 0.4, Source::rule("a"))},
        SourceWeights{});
    const auto plan = optimize(candidates, two_app_state());
    REQUIRE(plan.selected.size() == 1);
    const auto& targets = plan.selected[0].adaptations[0].targets;
    CHECK(targets == std::vector<std::string>{"ChatApp", "WeatherApp"});
  }

  SUBCASE("equal-impact conflicting candidates resolve by bundle key") {
    const auto candidates =
        consolidate({make_inference({{"opacity", Value::number(1.0), {"WeatherApp"}}}, 0.4,
                                    Source::rule("a")),
                     make_inference({{"opacity", Value::number(0.3), {"WeatherApp"}}}, 0.4,
                                    Source::rule("b"))},
                    SourceWeights{});
    const auto first = optimize(candidates, two_app_state());
    const auto second = optimize(candidates, two_app_state());
    CHECK(first == second);
    REQUIRE(first.selected.size() == 1);
    // "opacity=0.3@..." sorts before "opacity=1@..."; include-first keeps it.
    CHECK(first.selected[0].adaptations[0].value == Value::number(0.3));
  }
}

TEST_CASE("optimize matches exhaustive enumeration on random instances") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<std::size_t> size(1, 12);
  for (int instance = 0; instance < 30; ++instance) {
    const auto candidates = test::random_candidates(rng, size(rng));
    const double expected = test::best_subset_by_enumeration(candidates);
    const auto plan = optimize(candidates, pool_state());
    CHECK(plan.total_impact == doctest::Approx(expected).epsilon(1e-12));
    // Validity: pairwise conflict-free, all positive.
    for (std::size_t i = 0; i < plan.selected.size(); ++i) {
      CHECK(plan.selected[i].impact > 0.0);
      for (std::size_t j = i + 1; j < plan.selected.size(); ++j) {
        CHECK_FALSE(conflicts(plan.selected[i], plan.selected[j]));
      }
    }
  }
}

TEST_CASE("optimize stays valid beyond the exact-search limit") {
  std::mt19937 rng(23);
  const auto candidates = test::random_candidates(rng, kExactSearchLimit + 15);
  const auto plan = optimize(candidates, pool_state());
  for (std::size_t i = 0; i < plan.selected.size(); ++i) {
    CHECK(plan.selected[i].impact > 0.0);
    for (std::size_t j = i + 1; j < plan.selected.size(); ++j) {
      CHECK_FALSE(conflicts(plan.selected[i], plan.selected[j]));
    }
  }
}

TEST_CASE("apply writes plan values and preserves untouched entries") {
  InterfaceState state;
  state.entities["Map"] = {{"visibility", Value::categorical("Visible")},
                           {"scale", Value::number(1.0)}};
  state.entities["Stock"] = {{"visibility", Value::categorical("Visible")},
                             {"scale", Value::number(1.0)}};

  AdaptationPlan plan;
  ConsolidatedInference minimize;
  minimize.adaptations = {{"visibility", Value::categorical("Minimized"), {"Map"}}};
  minimize.impact = 0.4;
  minimize.key = bundle_key(minimize.adaptations);
  plan.selected = {minimize};
  plan.total_impact = 0.4;

  const auto next = apply(plan, state);
  CHECK(next.entities.at("Map").at("visibility") == Value::categorical("Minimized"));
  CHECK(next.entities.at("Map").at("scale") == Value::number(1.0));
  CHECK(next.entities.at("Stock").at("visibility") == Value::categorical("Visible"));

  CHECK(apply(AdaptationPlan{}, state) == state);

  ConsolidatedInference unknown;
  unknown.adaptations = {{"visibility", Value::categorical("Minimized"), {"Calculator"}}};
  unknown.impact = 0.4;
  AdaptationPlan bad;
  bad.selected = {unknown};
  CHECK_THROWS_AS(apply(bad, state), Error);
}

#include <benchmark/benchmark.h>

#include <random>

#include "iar/adapt.hpp"
#include "iar/harness.hpp"
#include "iar/learner.hpp"
#include "iar/rules.hpp"

namespace {

using namespace iar;

std::string data_path(const char* file) { return std::string(IAR_DATA_DIR) + "/" + file; }

std::vector<adapt::ConsolidatedInference> random_candidates(std::size_t count,
                                                            std::uint64_t seed) {
  static const std::vector<std::string> kDimensions = {"visibility", "opacity", "scale",
                                                       "frame_of_reference"};
  static const std::vector<std::string> kTargets = {"Map", "Book1", "Stock", "*"};
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_dim(0, kDimensions.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_target(0, kTargets.size() - 1);
  std::uniform_int_distribution<int> pick_value(0, 2);
  std::uniform_real_distribution<double> pick_impact(-1.0, 1.0);

  std::vector<adapt::ConsolidatedInference> out;
  for (std::size_t i = 0; i < count; ++i) {
    adapt::ConsolidatedInference c;
    c.adaptations = {{kDimensions[pick_dim(rng)],
                      Value::number(static_cast<double>(pick_value(rng))),
                      {kTargets[pick_target(rng)]}}};
    c.impact = pick_impact(rng);
    c.key = adapt::bundle_key(c.adaptations);
    out.push_back(std::move(c));
  }
  return out;
}

adapt::InterfaceState bench_state() { return harness::study_scenario().default_state; }

Context c1_context() {
  Context ctx;
  ctx.entries[rules::kObjectiveComponent] = Value::categorical("LocateBook1");
  ctx.entries[rules::kMobilityComponent] = Value::categorical("Mobile");
  ctx.entries[rules::kConfinementComponent] = Value::categorical("Unconfined");
  for (const auto& [component, value] :
       rules::derive_app_roles(ctx, rules::study_role_table())) {
    ctx.entries[component] = value;
  }
  return ctx;
}

void BM_OptimizeExact(benchmark::State& state) {
  const auto candidates = random_candidates(static_cast<std::size_t>(state.range(0)), 7);
  const auto interface_state = bench_state();
  for (auto _ : state) {
    benchmark::DoNotOptimize(adapt::optimize(candidates, interface_state));
  }
}
BENCHMARK(BM_OptimizeExact)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

void BM_OptimizeGreedy(benchmark::State& state) {
  const auto candidates = random_candidates(static_cast<std::size_t>(state.range(0)), 7);
  const auto interface_state = bench_state();
  for (auto _ : state) {
    benchmark::DoNotOptimize(adapt::optimize(candidates, interface_state));
  }
}
BENCHMARK(BM_OptimizeGreedy)->Arg(40)->Arg(80)->Arg(160);

void BM_InferRules(benchmark::State& state) {
  const auto registry = rules::study_registry();
  const auto rulebase =
      rules::load_rulepack_file(data_path("study_library_v1.json"), registry);
  const auto ctx = c1_context();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rules::infer_rules(rulebase, ctx));
  }
}
BENCHMARK(BM_InferRules);

void BM_FullCycleConsolidateOptimize(benchmark::State& state) {
  const auto registry = rules::study_registry();
  const auto rulebase =
      rules::load_rulepack_file(data_path("study_library_v1.json"), registry);
  const auto ctx = c1_context();
  const auto interface_state = bench_state();
  for (auto _ : state) {
    const auto inferences = rules::infer_rules(rulebase, ctx);
    const auto candidates = adapt::consolidate(inferences, adapt::SourceWeights{});
    benchmark::DoNotOptimize(adapt::optimize(candidates, interface_state));
  }
}
BENCHMARK(BM_FullCycleConsolidateOptimize);

void BM_LearnerObserve(benchmark::State& state) {
  const learner::LearnerConfig config;
  const auto ctx = c1_context();
  adapt::AdaptationPlan plan;
  adapt::ConsolidatedInference c;
  c.adaptations = {{"opacity", Value::number(1.0), {"Map"}}};
  c.impact = 0.7;
  c.key = adapt::bundle_key(c.adaptations);
  plan.selected = {c};
  learner::PersonalModel model;
  for (auto _ : state) {
    learner::observe(model, {ctx, plan, {}, 0}, config);
  }
}
BENCHMARK(BM_LearnerObserve);

void BM_SynthTrace(benchmark::State& state) {
  const auto config = harness::study_marginals();
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::synth_trace(1, config));
  }
}
BENCHMARK(BM_SynthTrace);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "iar/rules.hpp"
#include "iar/value.hpp"

namespace iar::adapt {

// Consolidation weight per inference source.
struct SourceWeights {
  double rule = 1.0;
  double personalized = 1.0;
  double universal = 0.5;

  double of(const rules::Source& source) const noexcept;

  friend bool operator==(const SourceWeights&, const SourceWeights&) = default;
};

struct Provenance {
  rules::Source source;
  double raw_impact = 0.0;
  double weight = 1.0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// One candidate adaptation bundle with its consensus impact and the
// inferences that contributed to it.
struct ConsolidatedInference {
  std::vector<rules::Adaptation> adaptations;
  double impact = 0.0;
  std::vector<Provenance> provenance;
  std::string key;  // canonical bundle key; the deterministic ordering handle

  friend bool operator==(const ConsolidatedInference&, const ConsolidatedInference&) = default;
};

// Canonical identity of a bundle: its (dimension, value, targets) triples
// sorted. Two inferences with the same key propose the same adjustment.
std::string bundle_key(std::span<const rules::Adaptation> adaptations);

// Groups inferences by bundle key and synthesizes one consensus impact per
// group (weighted arithmetic mean). Output is sorted by key, so the result is
// independent of input order.
std::vector<ConsolidatedInference> consolidate(const std::vector<rules::Inference>& inferences,
                                               const SourceWeights& weights);

// True iff some adaptation of `a` and some adaptation of `b` assign different
// values to the same dimension on overlapping targets.
bool conflicts(const ConsolidatedInference& a, const ConsolidatedInference& b);

// Current per-entity design-dimension values.
struct InterfaceState {
  std::map<std::string, std::map<std::string, Value>> entities;

  std::vector<std::string> entity_ids() const;
  const Value* find(const std::string& entity, const std::string& dimension) const noexcept;

  friend bool operator==(const InterfaceState&, const InterfaceState&) = default;
};

struct AdaptationPlan {
  std::vector<ConsolidatedInference> selected;  // pairwise conflict-free, impacts > 0
  double total_impact = 0.0;

  friend bool operator==(const AdaptationPlan&, const AdaptationPlan&) = default;
};

// Above this many candidates the optimizer switches from exact search to the
// greedy fallback.
inline constexpr std::size_t kExactSearchLimit = 20;

// Selects the conflict-free subset of positive-impact candidates maximizing
// total impact. Wildcard targets are expanded against the state's entity list
// first, so plan adaptations always name concrete entities. Exact
// branch-and-bound up to kExactSearchLimit candidates, greedy with conflict
// skipping beyond; ties break on bundle key.
AdaptationPlan optimize(std::vector<ConsolidatedInference> candidates,
                        const InterfaceState& state);

// Writes every adaptation of the plan to its targets. Unknown targets throw
// UnknownEntity; untouched entries are preserved.
InterfaceState apply(const AdaptationPlan& plan, InterfaceState state);

std::string serialize_plan(const AdaptationPlan& plan,
                           const std::vector<ConsolidatedInference>& candidates);

}  // namespace iar::adapt

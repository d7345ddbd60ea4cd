#include "iar/adapt.hpp"

#include <algorithm>

#include "iar/error.hpp"
#include "json_util.hpp"

namespace iar::adapt {

double SourceWeights::of(const rules::Source& source) const noexcept {
  switch (source.kind) {
    case rules::SourceKind::Rule: return rule;
    case rules::SourceKind::Personalized: return personalized;
    case rules::SourceKind::Universal: return universal;
  }
  return 0.0;
}

std::string bundle_key(std::span<const rules::Adaptation> adaptations) {
  std::vector<std::string> parts;
  parts.reserve(adaptations.size());
  for (const auto& a : adaptations) {
    auto targets = a.targets;
    std::sort(targets.begin(), targets.end());
    std::string t;
    for (const auto& target : targets) {
      if (!t.empty()) t += ",";
      t += target;
    }
    parts.push_back(a.dimension + "=" + a.value.token() + "@" + t);
  }
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) {
    if (!key.empty()) key += ";";
    key += p;
  }
  return key;
}

std::vector<ConsolidatedInference> consolidate(const std::vector<rules::Inference>& inferences,
                                               const SourceWeights& weights) {
  std::map<std::string, ConsolidatedInference> groups;
  for (const auto& inference : inferences) {
    std::string key = bundle_key(inference.adaptations);
    auto [it, inserted] = groups.try_emplace(std::move(key));
    if (inserted) {
      it->second.adaptations = inference.adaptations;
      it->second.key = it->first;
    }
    it->second.provenance.push_back(
        {inference.source, inference.impact, weights.of(inference.source)});
  }

  std::vector<ConsolidatedInference> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) {
    // Sort contributions before summing so the consensus is bit-identical
    // under any permutation of the input inferences.
    std::sort(group.provenance.begin(), group.provenance.end(),
              [](const Provenance& a, const Provenance& b) {
                if (a.source.kind != b.source.kind) return a.source.kind < b.source.kind;
                if (a.source.principle_id != b.source.principle_id) {
                  return a.source.principle_id < b.source.principle_id;
                }
                return a.raw_impact < b.raw_impact;
              });
    double weighted_sum = 0.0;
    double weight_sum = 0.0;
    for (const auto& p : group.provenance) {
      weighted_sum += p.weight * p.raw_impact;
      weight_sum += p.weight;
    }
    group.impact = weight_sum > 0.0 ? weighted_sum / weight_sum : 0.0;
    out.push_back(std::move(group));
  }
  return out;  // map iteration is already key-sorted
}

bool conflicts(const ConsolidatedInference& a, const ConsolidatedInference& b) {
  for (const auto& x : a.adaptations) {
    for (const auto& y : b.adaptations) {
      if (rules::conflicting(x, y)) return true;
    }
  }
  return false;
}

std::vector<std::string> InterfaceState::entity_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entities.size());
  for (const auto& [id, _] : entities) ids.push_back(id);
  return ids;
}

const Value* InterfaceState::find(const std::string& entity,
                                  const std::string& dimension) const noexcept {
  auto it = entities.find(entity);
  if (it == entities.end()) return nullptr;
  auto jt = it->second.find(dimension);
  return jt == it->second.end() ? nullptr : &jt->second;
}

namespace {

void expand_wildcards(ConsolidatedInference& candidate, const std::vector<std::string>& all) {
  for (auto& adaptation : candidate.adaptations) {
    const bool has_wildcard =
        std::find(adaptation.targets.begin(), adaptation.targets.end(),
                  rules::kAllEntities) != adaptation.targets.end();
    if (has_wildcard) {
      adaptation.targets = all;
    }
  }
  candidate.key = bundle_key(candidate.adaptations);
}

struct SearchState {
  const std::vector<ConsolidatedInference>* candidates;
  const std::vector<std::vector<bool>>* conflict;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best;
  double best_total = 0.0;
  std::vector<double> suffix_sum;  // of positive impacts from index i onward
};

// Depth-first over candidates in key order; include-branch first, pruned by
// the remaining-impact bound. First solution found among equal totals wins,
// which keeps ties deterministic.
void search(SearchState& s, std::size_t index, double total) {
  if (total > s.best_total) {
    s.best_total = total;
    s.best = s.chosen;
  }
  if (index >= s.candidates->size()) return;
  if (total + s.suffix_sum[index] <= s.best_total) return;

  bool feasible = true;
  for (std::size_t picked : s.chosen) {
    if ((*s.conflict)[picked][index]) {
      feasible = false;
      break;
    }
  }
  if (feasible) {
    s.chosen.push_back(index);
    search(s, index + 1, total + (*s.candidates)[index].impact);
    s.chosen.pop_back();
  }
  search(s, index + 1, total);
}

}  // namespace

AdaptationPlan optimize(std::vector<ConsolidatedInference> candidates,
                        const InterfaceState& state) {
  const auto all_entities = state.entity_ids();
  for (auto& candidate : candidates) {
    expand_wildcards(candidate, all_entities);
  }
  // Negative or zero impact never improves the objective; drop early.
  std::erase_if(candidates, [](const ConsolidatedInference& c) { return c.impact <= 0.0; });
  std::sort(candidates.begin(), candidates.end(),
            [](const ConsolidatedInference& a, const ConsolidatedInference& b) {
              return a.key < b.key;
            });

  AdaptationPlan plan;
  if (candidates.empty()) return plan;

  if (candidates.size() <= kExactSearchLimit) {
    std::vector<std::vector<bool>> conflict(candidates.size(),
                                            std::vector<bool>(candidates.size(), false));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        conflict[i][j] = conflict[j][i] = conflicts(candidates[i], candidates[j]);
      }
    }
    SearchState s;
    s.candidates = &candidates;
    s.conflict = &conflict;
    s.suffix_sum.assign(candidates.size() + 1, 0.0);
    for (std::size_t i = candidates.size(); i-- > 0;) {
      s.suffix_sum[i] = s.suffix_sum[i + 1] + candidates[i].impact;
    }
    search(s, 0, 0.0);
    for (std::size_t index : s.best) {
      plan.selected.push_back(candidates[index]);
      plan.total_impact += candidates[index].impact;
    }
    return plan;
  }

  // Greedy fallback: take by impact (key as tie-break), skip on conflict.
  std::sort(candidates.begin(), candidates.end(),
            [](const ConsolidatedInference& a, const ConsolidatedInference& b) {
              if (a.impact != b.impact) return a.impact > b.impact;
              return a.key < b.key;
            });
  for (const auto& candidate : candidates) {
    const bool clashes = std::any_of(plan.selected.begin(), plan.selected.end(),
                                     [&](const ConsolidatedInference& picked) {
                                       return conflicts(picked, candidate);
                                     });
    if (!clashes) {
      plan.selected.push_back(candidate);
      plan.total_impact += candidate.impact;
    }
  }
  std::sort(plan.selected.begin(), plan.selected.end(),
            [](const ConsolidatedInference& a, const ConsolidatedInference& b) {
              return a.key < b.key;
            });
  return plan;
}

InterfaceState apply(const AdaptationPlan& plan, InterfaceState state) {
  for (const auto& candidate : plan.selected) {
    for (const auto& adaptation : candidate.adaptations) {
      for (const auto& target : adaptation.targets) {
        auto it = state.entities.find(target);
        if (it == state.entities.end()) {
          throw Error(ErrorKind::UnknownEntity,
                      "adaptation targets unknown entity '" + target + "'");
        }
        it->second[adaptation.dimension] = adaptation.value;
      }
    }
  }
  return state;
}

namespace {

detail::Json consolidated_to_json(const ConsolidatedInference& c) {
  detail::Json adaptations = detail::Json::array();
  for (const auto& a : c.adaptations) {
    adaptations.push_back(detail::Json{{"dimension", a.dimension},
                                       {"value", detail::value_to_json(a.value)},
                                       {"targets", a.targets}});
  }
  detail::Json provenance = detail::Json::array();
  for (const auto& p : c.provenance) {
    provenance.push_back(detail::Json{{"source", p.source.describe()},
                                      {"impact", p.raw_impact},
                                      {"weight", p.weight}});
  }
  return detail::Json{{"impact", c.impact},
                      {"adaptations", std::move(adaptations)},
                      {"provenance", std::move(provenance)}};
}

}  // namespace

std::string serialize_plan(const AdaptationPlan& plan,
                           const std::vector<ConsolidatedInference>& candidates) {
  detail::Json selected = detail::Json::array();
  for (const auto& c : plan.selected) selected.push_back(consolidated_to_json(c));
  detail::Json considered = detail::Json::array();
  for (const auto& c : candidates) considered.push_back(consolidated_to_json(c));
  detail::Json doc{{"plan_version", 1},
                   {"total_impact", plan.total_impact},
                   {"selected", std::move(selected)},
                   {"candidates", std::move(considered)}};
  return doc.dump(2) + "\n";
}

}  // namespace iar::adapt

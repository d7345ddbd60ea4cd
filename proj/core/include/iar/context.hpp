#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>

#include "iar/registry.hpp"
#include "iar/value.hpp"

namespace iar {

// Immutable point-in-time view of the world state. snapshot_id increases by
// one per snapshot taken from the same store.
struct Context {
  std::uint64_t snapshot_id = 0;
  std::int64_t timestamp_ms = 0;
  std::map<std::string, Value> entries;

  const Value* find(const std::string& component_id) const noexcept {
    auto it = entries.find(component_id);
    return it == entries.end() ? nullptr : &it->second;
  }

  friend bool operator==(const Context&, const Context&) = default;
};

// Mutable intake for context component values. Writers may be concurrent;
// snapshot() hands out a consistent copy of the store at that instant.
// Timestamps are caller-supplied, which keeps replays deterministic.
class ContextStore {
 public:
  explicit ContextStore(const ComponentRegistry& registry) : registry_(&registry) {}

  // Last write wins. Throws UnknownComponent / ValueOutOfDomain.
  void upsert(const std::string& component_id, Value value, std::int64_t timestamp_ms);

  // Consistent view; assigns the next snapshot id. The snapshot's timestamp is
  // the newest upsert timestamp seen (0 when the store is empty).
  Context snapshot();

  const ComponentRegistry& registry() const noexcept { return *registry_; }

 private:
  mutable std::mutex mutex_;
  const ComponentRegistry* registry_;
  std::map<std::string, Value> values_;
  std::int64_t last_timestamp_ms_ = 0;
  std::uint64_t next_snapshot_id_ = 1;
};

}  // namespace iar

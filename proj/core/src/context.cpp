#include "iar/context.hpp"

#include <algorithm>

namespace iar {

void ContextStore::upsert(const std::string& component_id, Value value,
                          std::int64_t timestamp_ms) {
  registry_->validate_value(component_id, value);
  std::lock_guard lock(mutex_);
  values_[component_id] = std::move(value);
  last_timestamp_ms_ = std::max(last_timestamp_ms_, timestamp_ms);
}

Context ContextStore::snapshot() {
  std::lock_guard lock(mutex_);
  Context ctx;
  ctx.snapshot_id = next_snapshot_id_++;
  ctx.timestamp_ms = last_timestamp_ms_;
  ctx.entries = values_;
  return ctx;
}

}  // namespace iar

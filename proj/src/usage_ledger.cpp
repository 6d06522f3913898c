#include "trafficlens/model_gateway.hpp"

namespace trafficlens {

UsageTotals record_call(UsageTotals totals, const ModelUsage& usage) noexcept {
  totals.calls += 1;
  totals.prompt_tokens += usage.prompt_tokens;
  totals.output_tokens += usage.output_tokens;
  totals.latency_ms += usage.latency_ms;
  return totals;
}

void UsageLedger::record(const ModelUsage& usage) {
  std::lock_guard lock(mu_);
  usages_.push_back(usage);
  totals_ = record_call(totals_, usage);
}

UsageTotals UsageLedger::totals() const {
  std::lock_guard lock(mu_);
  return totals_;
}

std::vector<ModelUsage> UsageLedger::usages() const {
  std::lock_guard lock(mu_);
  return usages_;
}

}  // namespace trafficlens

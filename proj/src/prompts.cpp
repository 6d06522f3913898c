#include "trafficlens/prompts.hpp"

#include <cctype>

namespace trafficlens {

std::string_view to_string(PromptRole role) {
  switch (role) {
    case PromptRole::kBase: return "base";
    case PromptRole::kFollowup: return "followup";
    case PromptRole::kBaseline: return "baseline";
  }
  return "base";
}

std::string_view to_string(AccumulationMode mode) {
  return mode == AccumulationMode::kAccumulate ? "accumulate" : "base_only";
}

AccumulationMode accumulation_mode_from_string(std::string_view name) {
  if (name == "accumulate") return AccumulationMode::kAccumulate;
  if (name == "base_only") return AccumulationMode::kBaseOnly;
  throw Error(ErrorKind::kConfig, "unknown accumulation mode: " + std::string(name));
}

void AccumulationPolicy::validate() const {
  if (max_context_chars < 200) {
    throw Error(ErrorKind::kInvalidArgument, "max_context_chars must be at least 200");
  }
}

std::string_view to_string(IngestMode mode) {
  return mode == IngestMode::kBaseline ? "baseline" : "trafficlens";
}

IngestMode ingest_mode_from_string(std::string_view name) {
  if (name == "baseline") return IngestMode::kBaseline;
  if (name == "trafficlens") return IngestMode::kTrafficLens;
  throw Error(ErrorKind::kConfig, "unknown mode: " + std::string(name));
}

PromptText base_prompt(PromptRole role) { return {std::string(kBasePrompt), role}; }

std::string truncate_at_word(std::string_view text, std::size_t max_chars) {
  if (text.size() <= max_chars) return std::string(text);
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };

  std::size_t cut = max_chars;
  if (!is_space(text[cut])) {
    // Back up to the whitespace that starts the word straddling the limit.
    while (cut > 0 && !is_space(text[cut - 1])) --cut;
  }
  while (cut > 0 && is_space(text[cut - 1])) --cut;
  if (cut == 0) {
    cut = max_chars;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  }
  return std::string(text.substr(0, cut));
}

PromptText followup_prompt(std::string_view prior_text, const AccumulationPolicy& policy) {
  if (prior_text.empty()) {
    throw Error(ErrorKind::kEmptyPriorText, "follow-up prompt needs prior text");
  }
  std::string text(kFollowupPrefix);
  text += truncate_at_word(prior_text, policy.max_context_chars);
  text += kFollowupSuffix;
  return {std::move(text), PromptRole::kFollowup};
}

int budget_for(int rank, const TokenBudgetSchedule& schedule, IngestMode mode) {
  if (rank < 0) throw Error(ErrorKind::kInvalidArgument, "camera rank must be >= 0");
  if (mode == IngestMode::kBaseline) return schedule.baseline_limit;
  return rank == 0 ? schedule.base_limit : schedule.followup_limit;
}

}  // namespace trafficlens

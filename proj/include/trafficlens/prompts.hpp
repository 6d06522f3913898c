#pragma once

#include <string>
#include <string_view>

#include "trafficlens/core_types.hpp"

namespace trafficlens {

enum class PromptRole { kBase, kFollowup, kBaseline };

std::string_view to_string(PromptRole role);

struct PromptText {
  std::string text;
  PromptRole role = PromptRole::kBase;
};

enum class AccumulationMode { kBaseOnly, kAccumulate };

std::string_view to_string(AccumulationMode mode);
AccumulationMode accumulation_mode_from_string(std::string_view name);

struct AccumulationPolicy {
  AccumulationMode mode = AccumulationMode::kAccumulate;
  std::size_t max_context_chars = 2000;

  void validate() const;
};

enum class IngestMode { kBaseline, kTrafficLens };

std::string_view to_string(IngestMode mode);
IngestMode ingest_mode_from_string(std::string_view name);

inline constexpr std::string_view kBasePrompt = "Compose a descriptive narrative.";
inline constexpr std::string_view kFollowupPrefix = "The image describes [";
inline constexpr std::string_view kFollowupSuffix = "]. Describe the undetected objects.";

/// Full-narrative prompt for the base camera (and for every call in baseline mode).
PromptText base_prompt(PromptRole role = PromptRole::kBase);

/// Cuts `text` to at most `max_chars` bytes, ending on a word boundary.
/// A single word longer than the limit is cut at the last UTF-8 character
/// boundary that fits.
std::string truncate_at_word(std::string_view text, std::size_t max_chars);

/// Follow-up prompt asking only for objects not already described in `prior_text`.
PromptText followup_prompt(std::string_view prior_text, const AccumulationPolicy& policy);

/// Maximum output tokens for a camera at `rank` (0 = base camera).
int budget_for(int rank, const TokenBudgetSchedule& schedule, IngestMode mode);

}  // namespace trafficlens

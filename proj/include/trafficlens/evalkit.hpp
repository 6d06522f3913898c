#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trafficlens/model_gateway.hpp"
#include "trafficlens/orchestrator.hpp"

namespace trafficlens {

struct TokenStats {
  int max = 0;
  int min = 0;
  double avg = 0.0;
};

TokenStats token_stats(std::span<const ModelUsage> usages);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Lowercased whitespace tokens with surrounding punctuation stripped;
/// tokens that are pure punctuation are dropped.
std::vector<std::string> rouge_tokens(std::string_view text);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Sentence-level ROUGE-L: precision = LCS/|candidate|, recall = LCS/|reference|.
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

struct SegmentPair {
  const NarrativeSegment* base = nullptr;
  const NarrativeSegment* followup = nullptr;
};

/// Non-skipped follow-up segments with their base segment, in segment order.
std::vector<SegmentPair> divergence_pairs(std::span<const NarrativeSegment> segments);

/// Mean ROUGE-L f1 of follow-up text against base text over the pairs.
double divergence_report(std::span<const SegmentPair> pairs);

struct SweepPoint {
  double delta = 0.0;
  Millis total_latency_ms = 0;
  int processed_clips = 0;
  int skipped_clips = 0;
};

/// One trafficlens ingestion per delta (ascending). Points run in parallel,
/// each with its own mock backend.
std::vector<SweepPoint> delta_sweep(std::span<const CameraFeedManifest> feeds,
                                    const IngestionConfig& cfg, std::span<const double> deltas,
                                    const MockLatencyModel& latency = {});

// --- tab-separated tables ----------------------------------------------------

std::string token_table(const IngestionReport& report, const std::string& model = "mock");
std::string ingestion_time_table(std::span<const IngestionReport> reports);
std::string divergence_table(std::span<const IngestionReport> reports);
std::string sweep_table(std::span<const SweepPoint> points, bool with_counts = true);

}  // namespace trafficlens

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trafficlens/core_types.hpp"
#include "trafficlens/ingest_frontend.hpp"
#include "trafficlens/model_gateway.hpp"
#include "trafficlens/prompts.hpp"

namespace trafficlens {

struct IngestionConfig {
  IngestMode mode = IngestMode::kTrafficLens;
  // Empty means "first camera in camera_order".
  std::optional<CameraId> base_camera;
  // Empty means manifest order.
  std::vector<CameraId> camera_order;
  TokenBudgetSchedule schedule;
  SimilarityConfig similarity;
  AccumulationPolicy accumulation;
  SegmenterConfig segmenter;
  int workers = 1;

  /// Fills camera order from the feeds and moves the base camera to the
  /// front. Throws kMissingBaseCamera / kInvalidArgument on bad setups.
  IngestionConfig resolved(std::span<const CameraFeedManifest> feeds) const;
};

/// Clips for every camera plus the base-aligned view, computed once per run.
struct PreparedClips {
  std::vector<CameraId> camera_order;  // base first
  std::vector<std::vector<ClipRecord>> clips;  // parallel to camera_order
  std::vector<AlignedClipPair> pairs;  // one per base clip; others follow camera_order[1..]
};

PreparedClips prepare_clips(std::span<const CameraFeedManifest> feeds,
                            const IngestionConfig& resolved_cfg);

struct IngestionReport {
  IngestionConfig config;  // resolved configuration the run used
  IntersectionDocument document;
  std::vector<NarrativeSegment> segments;
  // Sum of per-clip chain latencies: one worker processing clips back to back.
  Millis total_latency_ms = 0;
  // Makespan of the same chains list-scheduled onto `workers` workers.
  Millis parallel_latency_ms = 0;
  int vlm_calls = 0;
  int skipped_clips = 0;
  int absent_pairs = 0;
  int failed_calls = 0;
};

IngestionReport ingest(std::span<const CameraFeedManifest> feeds, const IngestionConfig& cfg,
                       VisionModel& vlm);

IngestionReport ingest_prepared(const PreparedClips& prepared, const IngestionConfig& resolved_cfg,
                                VisionModel& vlm);

/// One entry per base clip: base text, then each non-skipped follow-up text
/// in camera order, separated by single spaces.
IntersectionDocument assemble_document(std::span<const AlignedClipPair> pairs,
                                       std::span<const NarrativeSegment> segments);

struct SpeedupSummary {
  Millis baseline_ms = 0;
  Millis trafficlens_ms = 0;
  double ratio = 0.0;
};

SpeedupSummary summarize_speedup(const IngestionReport& baseline,
                                const IngestionReport& trafficlens);

SpeedupSummary compare_modes(std::span<const CameraFeedManifest> feeds,
                             const IngestionConfig& baseline_cfg,
                             const IngestionConfig& trafficlens_cfg, VisionModel& vlm);

// --- report file ------------------------------------------------------------

/// JSON with "metadata", "document", "segments" and "totals" sections.
std::string report_to_json(const IngestionReport& report, const std::string& backend = "mock");
void write_report_file(const IngestionReport& report, const std::string& path,
                       const std::string& backend = "mock");
IngestionReport report_from_json(const std::string& text);
IngestionReport read_report_file(const std::string& path);

}  // namespace trafficlens

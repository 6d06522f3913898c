#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trafficlens/core_types.hpp"

namespace trafficlens {

struct CameraFeedManifest {
  CameraId camera;
  double frame_rate_hz = 1.0 / 3.0;
  std::vector<FrameRecord> frames;

  /// Nominal spacing between frames, rounded to whole milliseconds.
  Millis frame_period_ms() const;
};

struct SegmenterConfig {
  Millis window_ms = 10000;
  double change_threshold = 0.5;

  void validate() const;
};

struct AlignedOther {
  CameraId camera;
  std::optional<ClipRecord> clip;
};

struct AlignedClipPair {
  ClipRecord base;
  std::vector<AlignedOther> others;
};

// --- manifest I/O -----------------------------------------------------------
//
// One JSON object per line:
//   {"camera":"left","ts_ms":3000,"media":"frames/left/000001.jpg",
//    "detections":[{"label":"car","box":[x0,y0,x1,y1],"conf":0.91}]}
// "media" and "detections" are optional; unknown keys are ignored.

/// Frame rate is inferred from the smallest timestamp gap (one frame every
/// three seconds when the feed has a single frame).
CameraFeedManifest parse_manifest(std::istream& in);
CameraFeedManifest parse_manifest_file(const std::string& path);

std::string serialize_frame(const FrameRecord& frame);
void serialize_manifest(const CameraFeedManifest& feed, std::ostream& out);
void write_manifest_file(const CameraFeedManifest& feed, const std::string& path);

// --- segmentation and alignment ----------------------------------------------

/// Union of per-frame detections; same-label boxes with IoU > 0.8 collapse to
/// the higher-confidence one.
std::vector<Detection> merge_detections(std::span<const FrameRecord> frames);

/// Splits a feed into non-overlapping clips that tile its time span.
std::vector<ClipRecord> segment_clips(const CameraFeedManifest& feed,
                                      const SegmenterConfig& cfg);

/// Pairs each base clip with the other camera's clip of largest temporal
/// overlap (at least half the base duration), each other clip used once.
std::vector<AlignedClipPair> align_clips(std::span<const ClipRecord> base,
                                         std::span<const ClipRecord> other);

}  // namespace trafficlens

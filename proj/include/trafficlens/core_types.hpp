#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trafficlens/error.hpp"

namespace trafficlens {

using Millis = std::int64_t;

/// Short camera identifier such as "left" or "right".
class CameraId {
 public:
  CameraId() = default;
  explicit CameraId(std::string value);

  const std::string& value() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const CameraId&) const = default;

 private:
  std::string value_;
};

/// Axis-aligned box in one camera's pixel space.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  /// Throws Error(kInvalidArgument) unless 0 <= min < max on both axes.
  static BoundingBox make(double x_min, double y_min, double x_max, double y_max);

  bool valid() const noexcept;
  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x_min + x_max); }
  double center_y() const noexcept { return 0.5 * (y_min + y_max); }

  bool operator==(const BoundingBox&) const = default;
};

struct Detection {
  std::string label;
  BoundingBox box;
  double confidence = 1.0;

  static Detection make(std::string label, BoundingBox box, double confidence);
  bool valid() const noexcept;

  bool operator==(const Detection&) const = default;
};

struct FrameRecord {
  CameraId camera;
  Millis timestamp_ms = 0;
  std::optional<std::string> media_ref;
  std::vector<Detection> detections;

  bool operator==(const FrameRecord&) const = default;
};

struct ClipRecord {
  int clip_id = 0;
  CameraId camera;
  Millis start_ms = 0;
  Millis end_ms = 0;
  FrameRecord key_frame;
  std::vector<Detection> detections;

  Millis duration_ms() const noexcept { return end_ms - start_ms; }
};

/// Per-rank output-token caps: rank 0 gets base_limit, later ranks followup_limit.
struct TokenBudgetSchedule {
  int base_limit = 80;
  int followup_limit = 32;
  int baseline_limit = 256;

  /// Throws Error(kInvalidArgument) unless 0 < followup <= base <= baseline.
  void validate() const;
};

enum class SegmentRole { kBase, kFollowup };

std::string_view to_string(SegmentRole role);

struct NarrativeSegment {
  int clip_id = 0;
  CameraId camera;
  // Base-camera clip this segment was aligned to; -1 when it had no partner.
  int base_clip_id = -1;
  SegmentRole role = SegmentRole::kBase;
  Millis start_ms = 0;
  std::string text;
  int max_output_tokens = 0;  // budget the call was made with; 0 when skipped
  int prompt_tokens = 0;
  int output_tokens = 0;
  Millis latency_ms = 0;
  bool skipped = false;
  // Similarity score that drove the skip decision; absent for base segments.
  std::optional<double> similarity;
  // Set when a follow-up backend call failed and the segment degraded to a skip.
  std::optional<std::string> error;

  bool valid() const noexcept;
};

struct DocumentEntry {
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::string body;  // base text followed by non-skipped follow-up texts

  /// "HH:MM:SS :\n" followed by the body.
  std::string text() const;
};

struct IntersectionDocument {
  std::vector<DocumentEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  /// Entries joined by blank lines, each with its timestamp header.
  std::string render() const;
};

struct SimilarityConfig {
  double delta = 0.21;

  void validate() const;
};

/// Ordered list of invariant violations; empty means the sequence is valid.
using Violations = std::vector<std::string>;

Violations validate_clip_sequence(std::span<const ClipRecord> clips);

/// Zero-padded "HH:MM:SS"; hours are not wrapped at 24.
std::string format_timestamp(Millis ms);

}  // namespace trafficlens

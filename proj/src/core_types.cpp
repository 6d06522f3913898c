#include "trafficlens/core_types.hpp"

#include <cstdio>

namespace trafficlens {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kMalformedRecord: return "malformed-record";
    case ErrorKind::kNonMonotoneTimestamps: return "non-monotone-timestamps";
    case ErrorKind::kEmptyFeed: return "empty-feed";
    case ErrorKind::kEmptyPriorText: return "empty-prior-text";
    case ErrorKind::kEmptyText: return "empty-text";
    case ErrorKind::kBudgetInvalid: return "budget-invalid";
    case ErrorKind::kBackendUnreachable: return "backend-unreachable";
    case ErrorKind::kBackendError: return "backend-error";
    case ErrorKind::kMissingBaseCamera: return "missing-base-camera";
    case ErrorKind::kMissingBaseSegment: return "missing-base-segment";
    case ErrorKind::kEmptyDocument: return "empty-document";
    case ErrorKind::kEmptyIndex: return "empty-index";
    case ErrorKind::kEmptyList: return "empty-list";
    case ErrorKind::kNoPairs: return "no-pairs";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

CameraId::CameraId(std::string value) : value_(std::move(value)) {
  if (value_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "camera id must be non-empty");
  }
}

BoundingBox BoundingBox::make(double x_min, double y_min, double x_max, double y_max) {
  BoundingBox box{x_min, y_min, x_max, y_max};
  if (!box.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "invalid bounding box");
  }
  return box;
}

bool BoundingBox::valid() const noexcept {
  return x_min >= 0.0 && y_min >= 0.0 && x_min < x_max && y_min < y_max;
}

Detection Detection::make(std::string label, BoundingBox box, double confidence) {
  Detection det{std::move(label), box, confidence};
  if (!det.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "invalid detection");
  }
  return det;
}

bool Detection::valid() const noexcept {
  return !label.empty() && box.valid() && confidence >= 0.0 && confidence <= 1.0;
}

void TokenBudgetSchedule::validate() const {
  if (followup_limit < 1 || base_limit < 1 || baseline_limit < 1) {
    throw Error(ErrorKind::kInvalidArgument, "token limits must be positive");
  }
  if (!(followup_limit <= base_limit && base_limit <= baseline_limit)) {
    throw Error(ErrorKind::kInvalidArgument,
                "token limits must satisfy followup <= base <= baseline");
  }
}

std::string_view to_string(SegmentRole role) {
  return role == SegmentRole::kBase ? "base" : "followup";
}

bool NarrativeSegment::valid() const noexcept {
  if (prompt_tokens < 0 || output_tokens < 0 || latency_ms < 0) return false;
  if (skipped && (!text.empty() || output_tokens != 0)) return false;
  if (role == SegmentRole::kBase && skipped) return false;
  return true;
}

std::string DocumentEntry::text() const {
  return format_timestamp(start_ms) + " :\n" + body;
}

std::string IntersectionDocument::render() const {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += entries[i].text();
  }
  return out;
}

void SimilarityConfig::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "delta must lie in [0,1]");
  }
}

Violations validate_clip_sequence(std::span<const ClipRecord> clips) {
  Violations out;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const ClipRecord& clip = clips[i];
    if (clip.camera != clips.front().camera) {
      out.push_back("clip " + std::to_string(i) + " belongs to camera '" +
                    clip.camera.value() + "'");
    }
    if (clip.start_ms >= clip.end_ms) {
      out.push_back("empty range in clip " + std::to_string(i));
    } else if (clip.key_frame.timestamp_ms < clip.start_ms ||
               clip.key_frame.timestamp_ms > clip.end_ms) {
      out.push_back("key frame outside clip " + std::to_string(i));
    }
    if (i == 0) continue;
    const ClipRecord& prev = clips[i - 1];
    if (clip.start_ms < prev.start_ms) {
      out.push_back("disorder between clip " + std::to_string(i - 1) + " and " +
                    std::to_string(i));
    } else if (clip.start_ms < prev.end_ms) {
      out.push_back("overlap between clip " + std::to_string(i - 1) + " and " +
                    std::to_string(i));
    }
  }
  return out;
}

std::string format_timestamp(Millis ms) {
  if (ms < 0) {
    throw Error(ErrorKind::kInvalidArgument, "timestamp must be non-negative");
  }
  const long long total = ms / 1000;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", total / 3600,
                (total / 60) % 60, total % 60);
  return buf;
}

}  // namespace trafficlens

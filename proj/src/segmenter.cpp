#include <algorithm>
#include <cmath>

#include "trafficlens/ingest_frontend.hpp"
#include "trafficlens/similarity.hpp"

namespace trafficlens {
namespace {

constexpr double kMergeIou = 0.8;
constexpr double kMinAlignedOverlap = 0.5;

ClipRecord make_clip(const CameraFeedManifest& feed, std::size_t first, std::size_t last,
                     Millis end_ms, int clip_id) {
  std::span<const FrameRecord> frames(feed.frames.data() + first, last - first);
  ClipRecord clip;
  clip.clip_id = clip_id;
  clip.camera = feed.camera;
  clip.start_ms = frames.front().timestamp_ms;
  clip.end_ms = end_ms;

  // Key frame: the frame nearest the clip midpoint, earlier frame on ties.
  const Millis twice_mid = clip.start_ms + clip.end_ms;
  std::size_t key = 0;
  Millis best = std::llabs(2 * frames[0].timestamp_ms - twice_mid);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const Millis d = std::llabs(2 * frames[i].timestamp_ms - twice_mid);
    if (d < best) {
      best = d;
      key = i;
    }
  }
  clip.key_frame = frames[key];
  clip.detections = merge_detections(frames);
  return clip;
}

}  // namespace

void SegmenterConfig::validate() const {
  if (window_ms < 1000) {
    throw Error(ErrorKind::kInvalidArgument, "window_ms must be at least 1000");
  }
  if (!(change_threshold >= 0.0 && change_threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "change_threshold must lie in [0,1]");
  }
}

std::vector<Detection> merge_detections(std::span<const FrameRecord> frames) {
  std::vector<Detection> merged;
  for (const FrameRecord& frame : frames) {
    for (const Detection& det : frame.detections) {
      auto dup = std::find_if(merged.begin(), merged.end(), [&](const Detection& m) {
        return m.label == det.label && iou(m.box, det.box) > kMergeIou;
      });
      if (dup == merged.end()) {
        merged.push_back(det);
      } else if (det.confidence > dup->confidence) {
        *dup = det;
      }
    }
  }
  return merged;
}

std::vector<ClipRecord> segment_clips(const CameraFeedManifest& feed,
                                      const SegmenterConfig& cfg) {
  cfg.validate();
  if (feed.frames.empty()) {
    throw Error(ErrorKind::kEmptyFeed, "feed '" + feed.camera.value() + "' has no frames");
  }

  std::vector<ClipRecord> clips;
  std::size_t first = 0;
  for (std::size_t i = 1; i < feed.frames.size(); ++i) {
    const FrameRecord& prev = feed.frames[i - 1];
    const FrameRecord& cur = feed.frames[i];
    const bool window_elapsed =
        cur.timestamp_ms - feed.frames[first].timestamp_ms >= cfg.window_ms;
    const double change = 1.0 - detection_similarity(prev.detections, cur.detections).score;
    if (window_elapsed || change > cfg.change_threshold) {
      clips.push_back(make_clip(feed, first, i, cur.timestamp_ms,
                                static_cast<int>(clips.size())));
      first = i;
    }
  }
  const Millis end = feed.frames.back().timestamp_ms + feed.frame_period_ms();
  clips.push_back(make_clip(feed, first, feed.frames.size(), end,
                            static_cast<int>(clips.size())));
  return clips;
}

std::vector<AlignedClipPair> align_clips(std::span<const ClipRecord> base,
                                         std::span<const ClipRecord> other) {
  struct Candidate {
    Millis overlap;
    std::size_t base_index;
    std::size_t other_index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Millis duration = base[i].duration_ms();
    for (std::size_t j = 0; j < other.size(); ++j) {
      const Millis overlap = std::min(base[i].end_ms, other[j].end_ms) -
                             std::max(base[i].start_ms, other[j].start_ms);
      if (overlap > 0 &&
          static_cast<double>(overlap) >= kMinAlignedOverlap * static_cast<double>(duration)) {
        candidates.push_back({overlap, i, j});
      }
    }
  }
  // Ties prefer earlier base clips, then earlier other clips by start time so
  // the result does not depend on the order of `other`.
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (base[a.base_index].start_ms != base[b.base_index].start_ms) {
      return base[a.base_index].start_ms < base[b.base_index].start_ms;
    }
    return other[a.other_index].start_ms < other[b.other_index].start_ms;
  });

  std::vector<AlignedClipPair> pairs(base.size());
  std::vector<bool> other_used(other.size(), false);
  for (std::size_t i = 0; i < base.size(); ++i) {
    pairs[i].base = base[i];
    pairs[i].others.push_back({other.empty() ? CameraId{} : other.front().camera, std::nullopt});
  }
  for (const Candidate& c : candidates) {
    AlignedOther& slot = pairs[c.base_index].others.front();
    if (slot.clip || other_used[c.other_index]) continue;
    other_used[c.other_index] = true;
    slot.clip = other[c.other_index];
  }
  return pairs;
}

}  // namespace trafficlens

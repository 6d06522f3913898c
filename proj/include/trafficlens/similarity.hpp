#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trafficlens/core_types.hpp"

namespace trafficlens {

struct DetectionMatch {
  std::size_t base_index = 0;
  std::size_t other_index = 0;
  double iou = 0.0;
};

struct ClipSimilarity {
  double score = 0.0;
  std::vector<DetectionMatch> matches;
};

/// Area of intersection over area of union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Greedy one-to-one matching between equal labels, highest IoU first.
/// Ties break on (base_index, other_index); zero-IoU pairs never match.
std::vector<DetectionMatch> match_detections(std::span<const Detection> base,
                                             std::span<const Detection> other);

/// Sum of matched IoUs over the larger detection count. Two empty detection
/// sets count as identical (an empty road looks the same from every camera).
ClipSimilarity detection_similarity(std::span<const Detection> base,
                                    std::span<const Detection> other);

ClipSimilarity clip_similarity(const ClipRecord& base, const ClipRecord& other);

/// A follow-up clip is redundant when its score reaches delta.
inline bool should_skip(const ClipSimilarity& sim, const SimilarityConfig& cfg) noexcept {
  return sim.score >= cfg.delta;
}

}  // namespace trafficlens

#include "trafficlens/similarity.hpp"

#include <algorithm>

namespace trafficlens {

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<DetectionMatch> match_detections(std::span<const Detection> base,
                                             std::span<const Detection> other) {
  std::vector<DetectionMatch> candidates;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = 0; j < other.size(); ++j) {
      if (base[i].label != other[j].label) continue;
      const double v = iou(base[i].box, other[j].box);
      if (v > 0.0) candidates.push_back({i, j, v});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const DetectionMatch& a, const DetectionMatch& b) {
                     return a.iou > b.iou;
                   });

  std::vector<bool> base_used(base.size(), false);
  std::vector<bool> other_used(other.size(), false);
  std::vector<DetectionMatch> matches;
  for (const DetectionMatch& c : candidates) {
    if (base_used[c.base_index] || other_used[c.other_index]) continue;
    base_used[c.base_index] = true;
    other_used[c.other_index] = true;
    matches.push_back(c);
  }
  return matches;
}

ClipSimilarity detection_similarity(std::span<const Detection> base,
                                    std::span<const Detection> other) {
  ClipSimilarity sim;
  if (base.empty() && other.empty()) {
    sim.score = 1.0;
    return sim;
  }
  sim.matches = match_detections(base, other);
  double total = 0.0;
  for (const DetectionMatch& m : sim.matches) total += m.iou;
  const auto denom = static_cast<double>(std::max(base.size(), other.size()));
  sim.score = std::clamp(total / denom, 0.0, 1.0);
  return sim;
}

ClipSimilarity clip_similarity(const ClipRecord& base, const ClipRecord& other) {
  return detection_similarity(base.detections, other.detections);
}

}  // namespace trafficlens

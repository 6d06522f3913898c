#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "trafficlens/core_types.hpp"
#include "trafficlens/ingest_frontend.hpp"

namespace trafficlens {

/// Seeded synthetic two-camera intersection. Each clip window holds a static
/// set of objects in the base camera; the second camera sees `shared` exact
/// copies of them plus new objects in a disjoint image region, so the clip
/// similarity of window i is exactly shared[i] / objects[i].
struct FixtureOptions {
  std::uint64_t seed = 7;
  int clips = 200;
  Millis clip_ms = 10000;
  Millis frame_gap_ms = 2000;
  int min_objects = 16;
  int max_objects = 24;
  // Fraction of windows built to score at or above `similar_threshold`.
  double similar_fraction = 0.5;
  double similar_threshold = 0.21;
};

struct FixturePlan {
  std::vector<CameraFeedManifest> feeds;  // base camera ("right") first
  std::vector<int> objects;               // per window
  std::vector<int> shared;                // per window
  std::vector<bool> similar;              // per window: designed score >= threshold
};

FixturePlan make_fixture(const FixtureOptions& opts = {});

/// Labels the fixture draws from.
const std::vector<std::string>& fixture_labels();

/// Small street-scene document for query demos; its 00:07:23 entry mentions
/// a white SUV and several entries mention people carrying backpacks.
IntersectionDocument make_street_document();

/// Portable uniform integer in [lo, hi] (mt19937_64 output is specified by
/// the standard; std distributions are not).
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

}  // namespace trafficlens

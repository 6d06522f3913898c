#include "trafficlens/fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace trafficlens {
namespace {

constexpr int kCols = 9;
constexpr int kRows = 10;
constexpr double kCell = 100.0;
constexpr double kOtherRegionX = 1000.0;

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

Detection random_object(std::mt19937_64& rng, int cell, double x_offset) {
  const double x0 = x_offset + (cell % kCols) * kCell + uniform_int(rng, 0, 20);
  const double y0 = (cell / kCols) * kCell + uniform_int(rng, 0, 20);
  const auto& labels = fixture_labels();
  Detection d;
  d.label = labels[rng() % labels.size()];
  d.box = {x0, y0, x0 + uniform_int(rng, 40, 79), y0 + uniform_int(rng, 40, 79)};
  d.confidence = uniform_int(rng, 50, 99) / 100.0;
  return d;
}

std::string media_path(const std::string& camera, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "frames/%s/%06zu.jpg", camera.c_str(), index);
  return buf;
}

// Smallest k with k / n >= threshold, in integer arithmetic on hundredths.
int min_similar_shared(int n, double threshold) {
  const auto hundredths = static_cast<long>(threshold * 100.0 + 0.5);
  int k = 0;
  while (k < n && 100L * k < hundredths * n) ++k;
  return k;
}

}  // namespace

const std::vector<std::string>& fixture_labels() {
  static const std::vector<std::string> labels = {
      "car",        "truck",   "bus",     "bicycle",       "person", "white suv",
      "black suv",  "backpack", "dog",    "traffic light", "van",    "motorcycle",
      "stroller",   "scooter", "umbrella", "manhole cover"};
  return labels;
}

FixturePlan make_fixture(const FixtureOptions& opts) {
  if (opts.clips < 1 || opts.min_objects < 1 || opts.max_objects < opts.min_objects ||
      opts.max_objects > kCols * kRows || opts.frame_gap_ms <= 0 ||
      opts.clip_ms < opts.frame_gap_ms) {
    throw Error(ErrorKind::kInvalidArgument, "invalid fixture options");
  }
  std::mt19937_64 rng(opts.seed);
  FixturePlan plan;
  CameraFeedManifest base{CameraId("right"), 1000.0 / static_cast<double>(opts.frame_gap_ms), {}};
  CameraFeedManifest other{CameraId("left"), base.frame_rate_hz, {}};

  const auto similar_count = static_cast<std::size_t>(opts.similar_fraction * opts.clips + 0.5);
  plan.similar.assign(static_cast<std::size_t>(opts.clips), false);
  std::fill_n(plan.similar.begin(), std::min(similar_count, plan.similar.size()), true);
  shuffle(plan.similar, rng);

  std::vector<int> cells(kCols * kRows);
  for (int c = 0; c < opts.clips; ++c) {
    const int n = uniform_int(rng, opts.min_objects, opts.max_objects);
    const int k_min = min_similar_shared(n, opts.similar_threshold);
    const int shared = plan.similar[c] ? uniform_int(rng, k_min, n)
                                       : (k_min == 0 ? 0 : uniform_int(rng, 0, k_min - 1));

    std::iota(cells.begin(), cells.end(), 0);
    shuffle(cells, rng);
    std::vector<Detection> base_objects;
    for (int i = 0; i < n; ++i) base_objects.push_back(random_object(rng, cells[i], 0.0));

    std::iota(cells.begin(), cells.end(), 0);
    shuffle(cells, rng);
    std::vector<Detection> other_objects(base_objects.begin(), base_objects.begin() + shared);
    for (int i = shared; i < n; ++i) other_objects.push_back(random_object(rng, cells[i], kOtherRegionX));
    shuffle(other_objects, rng);

    plan.objects.push_back(n);
    plan.shared.push_back(shared);
    for (Millis t = 0; t < opts.clip_ms; t += opts.frame_gap_ms) {
      const Millis ts = c * opts.clip_ms + t;
      base.frames.push_back({base.camera, ts, media_path("right", base.frames.size()), base_objects});
      other.frames.push_back({other.camera, ts, media_path("left", other.frames.size()), other_objects});
    }
  }
  plan.feeds.push_back(std::move(base));
  plan.feeds.push_back(std::move(other));
  return plan;
}

IntersectionDocument make_street_document() {
  IntersectionDocument doc;
  auto add = [&](Millis start_s, std::string body) {
    doc.entries.push_back({start_s * 1000, (start_s + 10) * 1000, std::move(body)});
  };
  add(61, "Two cars wait at the red light while a cyclist rolls through the bike lane. "
          "A delivery truck is double parked near the corner store.");
  add(158, "A woman in a red coat crosses at the crosswalk carrying a backpack. "
           "Traffic on the avenue is light.");
  add(297, "A city bus pulls away from the stop. A pedestrian with a backpack waits on the curb "
           "looking at a phone.");
  add(443, "A black SUV and a white SUV are parked along the right side of the street. "
           "Trees line the sidewalk and a crosswalk is painted in the foreground.");
  add(512, "A man in a grey hoodie walks toward the camera with a backpack over one shoulder. "
           "A taxi turns left at the intersection.");
  add(640, "A woman holding a black bag steps off the curb. Two scooters are parked by the "
           "lamppost.");
  add(777, "The intersection is empty apart from a parked van. A manhole cover sits in the "
           "middle of the lane.");
  return doc;
}

}  // namespace trafficlens

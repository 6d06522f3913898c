#include "doctest.h"
#include "helpers.hpp"

#include <random>
#include <set>

using namespace trafficlens;
using testing::clip;

TEST_CASE("boxes and detections validate their ranges") {
  CHECK_THROWS_AS(BoundingBox::make(10, 0, 5, 5), Error);
  CHECK_THROWS_AS(BoundingBox::make(-1, 0, 5, 5), Error);
  CHECK_THROWS_AS(BoundingBox::make(0, 0, 5, 0), Error);
  const auto b = BoundingBox::make(0, 0, 4, 2);
  CHECK(b.area() == 8.0);
  CHECK(b.center_x() == 2.0);
  CHECK_THROWS_AS(Detection::make("", b, 0.5), Error);
  CHECK_THROWS_AS(Detection::make("car", b, 1.5), Error);
  CHECK(Detection::make("car", b, 1.0).valid());
  CHECK_THROWS_AS(CameraId(""), Error);
}

TEST_CASE("token schedule ordering") {
  CHECK_NOTHROW(TokenBudgetSchedule{}.validate());
  CHECK_THROWS_AS((TokenBudgetSchedule{32, 80, 256}.validate()), Error);
  CHECK_THROWS_AS((TokenBudgetSchedule{80, 0, 256}.validate()), Error);
  CHECK_THROWS_AS((TokenBudgetSchedule{300, 32, 256}.validate()), Error);
  CHECK_THROWS_AS(SimilarityConfig{1.5}.validate(), Error);
  CHECK_NOTHROW(SimilarityConfig{0.0}.validate());
}

TEST_CASE("validate_clip_sequence examples") {
  std::vector<ClipRecord> ok = {clip("left", 0, 0, 5000), clip("left", 1, 5000, 9000)};
  CHECK(validate_clip_sequence(ok).empty());

  std::vector<ClipRecord> overlap = {clip("left", 0, 0, 5000), clip("left", 1, 4000, 9000)};
  const auto v = validate_clip_sequence(overlap);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "overlap between clip 0 and 1");

  CHECK(validate_clip_sequence(std::vector<ClipRecord>{}).empty());

  std::vector<ClipRecord> empty_range = {clip("left", 0, 5000, 5000)};
  CHECK_FALSE(validate_clip_sequence(empty_range).empty());
}

TEST_CASE("validate_clip_sequence agrees with pairwise brute force") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng() % 6);
    std::vector<ClipRecord> clips;
    for (int i = 0; i < n; ++i) {
      const Millis s = static_cast<Millis>(rng() % 50) * 1000;
      const Millis len = 1000 + static_cast<Millis>(rng() % 10) * 1000;
      clips.push_back(clip("left", i, s, s + len));
    }
    bool expect_ok = true;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool disjoint_sorted = clips[i].end_ms <= clips[j].start_ms;
        if (!disjoint_sorted) expect_ok = false;
      }
    }
    CHECK(validate_clip_sequence(clips).empty() == expect_ok);
  }
}

TEST_CASE("format_timestamp examples") {
  CHECK(format_timestamp(0) == "00:00:00");
  CHECK(format_timestamp(443000) == "00:07:23");
  CHECK(format_timestamp(3'723'000) == "01:02:03");
  CHECK(format_timestamp(100LL * 3600 * 1000) == "100:00:00");
  CHECK_THROWS_AS(format_timestamp(-1), Error);
}

TEST_CASE("format_timestamp is injective on whole seconds below 100 hours") {
  std::set<std::string> seen;
  for (Millis s = 0; s < 100 * 3600; s += 7) seen.insert(format_timestamp(s * 1000));
  CHECK(seen.size() == static_cast<std::size_t>((100 * 3600 + 6) / 7));
}

TEST_CASE("document entries carry timestamp headers") {
  DocumentEntry e{443000, 453000, "A white SUV."};
  CHECK(e.text() == "00:07:23 :\nA white SUV.");
  IntersectionDocument doc{{{0, 10000, "a"}, {10000, 20000, "b"}}};
  CHECK(doc.render() == "00:00:00 :\na\n\n00:00:10 :\nb");
}

TEST_CASE("narrative segment invariants") {
  NarrativeSegment s;
  s.camera = CameraId("left");
  s.role = SegmentRole::kFollowup;
  s.skipped = true;
  CHECK(s.valid());
  s.text = "leftover";
  CHECK_FALSE(s.valid());
  s.text.clear();
  s.role = SegmentRole::kBase;
  CHECK_FALSE(s.valid());
}

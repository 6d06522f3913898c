#include "doctest.h"
#include "helpers.hpp"

#include <random>
#include <set>
#include <sstream>

#include "trafficlens/fixtures.hpp"
#include "trafficlens/ingest_frontend.hpp"

using namespace trafficlens;
using testing::clip;
using testing::det;

TEST_CASE("two-line manifest parses") {
  std::istringstream in(
      R"({"camera":"left","ts_ms":0,"media":"f/0.jpg","detections":[{"label":"car","box":[1,2,30,40],"conf":0.9}]})"
      "\n"
      R"({"camera":"left","ts_ms":3000,"extra":"ignored"})"
      "\n");
  const auto feed = parse_manifest(in);
  CHECK(feed.camera == CameraId("left"));
  REQUIRE(feed.frames.size() == 2);
  CHECK(feed.frames[0].media_ref == std::optional<std::string>("f/0.jpg"));
  CHECK(feed.frames[0].detections.size() == 1);
  CHECK_FALSE(feed.frames[1].media_ref.has_value());
  CHECK(feed.frame_period_ms() == 3000);
}

TEST_CASE("malformed records report their line") {
  std::istringstream in(R"({"camera":"left","ts_ms":0})"
                        "\n\n"
                        R"({"ts_ms":3000})"
                        "\n");
  try {
    parse_manifest(in);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(e.kind() == ErrorKind::kMalformedRecord);
    CHECK(e.line() == 3);
  }

  std::istringstream bad_box(R"({"camera":"left","ts_ms":0,"detections":[{"label":"car","box":[5,5,1,1]}]})");
  CHECK_THROWS_AS(parse_manifest(bad_box), MalformedRecord);
  std::istringstream not_json("{camera");
  CHECK_THROWS_AS(parse_manifest(not_json), MalformedRecord);
}

TEST_CASE("timestamps must increase strictly") {
  std::istringstream in(R"({"camera":"left","ts_ms":3000})"
                        "\n"
                        R"({"camera":"left","ts_ms":3000})");
  try {
    parse_manifest(in);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNonMonotoneTimestamps);
  }
}

TEST_CASE("1000-frame manifest round-trips byte for byte") {
  std::mt19937_64 rng(3);
  CameraFeedManifest feed;
  feed.camera = CameraId("right");
  Millis t = 0;
  for (int i = 0; i < 1000; ++i) {
    FrameRecord f;
    f.camera = feed.camera;
    t += 1 + static_cast<Millis>(rng() % 5000);
    f.timestamp_ms = t;
    if (rng() % 3) f.media_ref = "frames/right/" + std::to_string(i) + ".jpg";
    const int n = static_cast<int>(rng() % 4);
    for (int d = 0; d < n; ++d) {
      const double x = static_cast<double>(rng() % 1000), y = static_cast<double>(rng() % 700);
      f.detections.push_back(det(fixture_labels()[rng() % fixture_labels().size()], x, y,
                                 x + 1 + static_cast<double>(rng() % 90), y + 1.5,
                                 static_cast<double>(rng() % 101) / 100.0));
    }
    feed.frames.push_back(std::move(f));
  }
  std::ostringstream first;
  serialize_manifest(feed, first);
  std::istringstream in(first.str());
  const auto parsed = parse_manifest(in);
  CHECK(parsed.frames == feed.frames);
  std::ostringstream second;
  serialize_manifest(parsed, second);
  CHECK(second.str() == first.str());
}

TEST_CASE("60 s static feed windows into six 10 s clips") {
  const auto feed = testing::static_feed("left", 60000, 1000, {det("car", 0, 0, 10, 10)});
  const auto clips = segment_clips(feed, {});
  REQUIRE(clips.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(clips[i].clip_id == i);
    CHECK(clips[i].start_ms == i * 10000);
    CHECK(clips[i].end_ms == (i + 1) * 10000);
  }
  CHECK(validate_clip_sequence(clips).empty());
}

TEST_CASE("scene change at 7 s puts boundaries at 7 s and 17 s") {
  const auto feed = testing::make_feed("left", 20000, 1000, [](Millis t) {
    return t < 7000 ? std::vector<Detection>{det("car", 0, 0, 10, 10)}
                    : std::vector<Detection>{det("bus", 200, 200, 300, 300)};
  });
  const auto clips = segment_clips(feed, {});
  REQUIRE(clips.size() == 3);
  CHECK(clips[0].end_ms == 7000);
  CHECK(clips[1].start_ms == 7000);
  CHECK(clips[1].end_ms == 17000);
  CHECK(clips[2].start_ms == 17000);
  CHECK(clips[2].end_ms == 20000);
  CHECK(clips[0].detections.size() == 1);
  CHECK(clips[1].detections[0].label == "bus");
}

TEST_CASE("empty feed is rejected") {
  CameraFeedManifest feed;
  feed.camera = CameraId("left");
  try {
    segment_clips(feed, {});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyFeed);
  }
}

TEST_CASE("key frame sits inside its clip") {
  const auto feed = testing::static_feed("left", 60000, 3000, {det("car", 0, 0, 10, 10)});
  for (const auto& c : segment_clips(feed, {})) {
    CHECK(c.key_frame.timestamp_ms >= c.start_ms);
    CHECK(c.key_frame.timestamp_ms < c.end_ms);
  }
}

TEST_CASE("clip detections merge near-duplicate boxes") {
  std::vector<FrameRecord> frames(2);
  frames[0].detections = {det("car", 0, 0, 100, 100, 0.6), det("person", 0, 0, 10, 10, 0.5)};
  frames[1].detections = {det("car", 1, 1, 100, 100, 0.8), det("truck", 0, 0, 100, 100, 0.7)};
  const auto merged = merge_detections(frames);
  REQUIRE(merged.size() == 3);
  int cars = 0;
  for (const auto& d : merged) {
    if (d.label == "car") {
      ++cars;
      CHECK(d.confidence == 0.8);
    }
  }
  CHECK(cars == 1);
}

TEST_CASE("alignment: identical boundaries pair one to one") {
  std::vector<ClipRecord> base, other;
  for (int i = 0; i < 5; ++i) {
    base.push_back(clip("right", i, i * 10000, (i + 1) * 10000));
    other.push_back(clip("left", i, i * 10000, (i + 1) * 10000));
  }
  const auto pairs = align_clips(base, other);
  REQUIRE(pairs.size() == 5);
  for (int i = 0; i < 5; ++i) {
    REQUIRE(pairs[i].others.size() == 1);
    REQUIRE(pairs[i].others[0].clip.has_value());
    CHECK(pairs[i].others[0].clip->clip_id == i);
  }
}

TEST_CASE("alignment: +2 s shift pairs each base clip with its 8 s neighbor") {
  std::vector<ClipRecord> base, other;
  for (int i = 0; i < 6; ++i) {
    base.push_back(clip("right", i, i * 10000, (i + 1) * 10000));
    other.push_back(clip("left", i, 2000 + i * 10000, 2000 + (i + 1) * 10000));
  }
  const auto pairs = align_clips(base, other);
  for (int i = 0; i < 6; ++i) {
    REQUIRE(pairs[i].others[0].clip.has_value());
    const auto& o = *pairs[i].others[0].clip;
    CHECK(o.clip_id == i);
    const Millis overlap = std::min(o.end_ms, base[i].end_ms) - std::max(o.start_ms, base[i].start_ms);
    CHECK(overlap == 8000);
  }
}

TEST_CASE("alignment: gap in the other camera leaves the pair absent") {
  std::vector<ClipRecord> base, other;
  for (int i = 0; i < 8; ++i) {
    base.push_back(clip("right", i, i * 10000, (i + 1) * 10000));
    if (i != 5) other.push_back(clip("left", static_cast<int>(other.size()), i * 10000, (i + 1) * 10000));
  }
  const auto pairs = align_clips(base, other);
  CHECK_FALSE(pairs[5].others[0].clip.has_value());
  CHECK(pairs[4].others[0].clip.has_value());
  CHECK(pairs[6].others[0].clip.has_value());
}

TEST_CASE("alignment invariant: every pairing overlaps at least half the base clip") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ClipRecord> base, other;
    Millis t = 0;
    for (int i = 0; i < 10; ++i) {
      const Millis len = 1000 + static_cast<Millis>(rng() % 12) * 1000;
      base.push_back(clip("right", i, t, t + len));
      t += len;
    }
    t = static_cast<Millis>(rng() % 5000);
    for (int i = 0; i < 12; ++i) {
      const Millis len = 1000 + static_cast<Millis>(rng() % 12) * 1000;
      other.push_back(clip("left", i, t, t + len));
      t += len + static_cast<Millis>(rng() % 2) * 3000;
    }
    std::set<int> used;
    for (const auto& p : align_clips(base, other)) {
      if (!p.others[0].clip) continue;
      const auto& o = *p.others[0].clip;
      const Millis ov = std::min(o.end_ms, p.base.end_ms) - std::max(o.start_ms, p.base.start_ms);
      CHECK(2 * ov >= p.base.duration_ms());
      CHECK(used.insert(o.clip_id).second);
    }
  }
}

TEST_CASE("segmenter config bounds") {
  CHECK_THROWS_AS((SegmenterConfig{999, 0.5}.validate()), Error);
  CHECK_THROWS_AS((SegmenterConfig{1000, 1.5}.validate()), Error);
}

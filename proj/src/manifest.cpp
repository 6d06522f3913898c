#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "trafficlens/ingest_frontend.hpp"

namespace trafficlens {
namespace {

using ordered_json = nlohmann::ordered_json;

double require_number(const nlohmann::json& v, std::size_t line, const char* what) {
  if (!v.is_number()) throw MalformedRecord(line, std::string(what) + " must be a number");
  return v.get<double>();
}

Detection parse_detection(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw MalformedRecord(line, "detection must be an object");
  auto label = j.find("label");
  if (label == j.end() || !label->is_string() || label->get<std::string>().empty()) {
    throw MalformedRecord(line, "detection missing \"label\"");
  }
  auto box = j.find("box");
  if (box == j.end() || !box->is_array() || box->size() != 4) {
    throw MalformedRecord(line, "detection \"box\" must be [x_min,y_min,x_max,y_max]");
  }
  Detection det;
  det.label = label->get<std::string>();
  det.box = {require_number((*box)[0], line, "box"), require_number((*box)[1], line, "box"),
             require_number((*box)[2], line, "box"), require_number((*box)[3], line, "box")};
  if (!det.box.valid()) throw MalformedRecord(line, "degenerate or negative box");
  auto conf = j.find("conf");
  det.confidence = conf == j.end() ? 1.0 : require_number(*conf, line, "conf");
  if (det.confidence < 0.0 || det.confidence > 1.0) {
    throw MalformedRecord(line, "\"conf\" outside [0,1]");
  }
  return det;
}

FrameRecord parse_record(const std::string& text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecord(line, e.what());
  }
  if (!j.is_object()) throw MalformedRecord(line, "record must be a JSON object");

  auto camera = j.find("camera");
  if (camera == j.end() || !camera->is_string() || camera->get<std::string>().empty()) {
    throw MalformedRecord(line, "missing \"camera\"");
  }
  auto ts = j.find("ts_ms");
  if (ts == j.end() || !ts->is_number_integer()) {
    throw MalformedRecord(line, "missing integer \"ts_ms\"");
  }
  if (ts->get<std::int64_t>() < 0) throw MalformedRecord(line, "negative \"ts_ms\"");

  FrameRecord frame;
  frame.camera = CameraId(camera->get<std::string>());
  frame.timestamp_ms = ts->get<std::int64_t>();
  if (auto media = j.find("media"); media != j.end() && !media->is_null()) {
    if (!media->is_string()) throw MalformedRecord(line, "\"media\" must be a string");
    frame.media_ref = media->get<std::string>();
  }
  if (auto dets = j.find("detections"); dets != j.end() && !dets->is_null()) {
    if (!dets->is_array()) throw MalformedRecord(line, "\"detections\" must be an array");
    for (const auto& d : *dets) frame.detections.push_back(parse_detection(d, line));
  }
  return frame;
}

// Integral coordinates are written without a fractional part.
ordered_json number(double v) {
  if (std::floor(v) == v && std::fabs(v) < 1e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

Millis CameraFeedManifest::frame_period_ms() const {
  return std::max<Millis>(1, std::llround(1000.0 / frame_rate_hz));
}

CameraFeedManifest parse_manifest(std::istream& in) {
  CameraFeedManifest feed;
  std::string text;
  std::size_t line = 0;
  Millis min_gap = std::numeric_limits<Millis>::max();
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    FrameRecord frame = parse_record(text, line);
    if (feed.frames.empty()) {
      feed.camera = frame.camera;
    } else {
      if (frame.camera != feed.camera) {
        throw MalformedRecord(line, "camera '" + frame.camera.value() +
                                        "' differs from '" + feed.camera.value() + "'");
      }
      const Millis prev = feed.frames.back().timestamp_ms;
      if (frame.timestamp_ms <= prev) {
        throw Error(ErrorKind::kNonMonotoneTimestamps,
                    "non-monotone timestamps at line " + std::to_string(line) + ": " +
                        std::to_string(frame.timestamp_ms) + " after " +
                        std::to_string(prev));
      }
      min_gap = std::min(min_gap, frame.timestamp_ms - prev);
    }
    feed.frames.push_back(std::move(frame));
  }
  if (feed.frames.empty()) throw MalformedRecord(line, "manifest has no records");
  feed.frame_rate_hz = feed.frames.size() > 1 ? 1000.0 / static_cast<double>(min_gap)
                                              : 1.0 / 3.0;
  return feed;
}

CameraFeedManifest parse_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest: " + path);
  return parse_manifest(in);
}

std::string serialize_frame(const FrameRecord& frame) {
  ordered_json j;
  j["camera"] = frame.camera.value();
  j["ts_ms"] = frame.timestamp_ms;
  if (frame.media_ref) j["media"] = *frame.media_ref;
  ordered_json dets = ordered_json::array();
  for (const Detection& d : frame.detections) {
    ordered_json jd;
    jd["label"] = d.label;
    jd["box"] = {number(d.box.x_min), number(d.box.y_min), number(d.box.x_max),
                 number(d.box.y_max)};
    jd["conf"] = number(d.confidence);
    dets.push_back(std::move(jd));
  }
  j["detections"] = std::move(dets);
  return j.dump();
}

void serialize_manifest(const CameraFeedManifest& feed, std::ostream& out) {
  for (const FrameRecord& frame : feed.frames) out << serialize_frame(frame) << '\n';
}

void write_manifest_file(const CameraFeedManifest& feed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest: " + path);
  serialize_manifest(feed, out);
}

}  // namespace trafficlens

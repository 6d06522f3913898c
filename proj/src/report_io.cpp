#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trafficlens/orchestrator.hpp"

namespace trafficlens {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json metadata(const IngestionConfig& cfg, const std::string& backend) {
  ordered_json m;
  m["mode"] = to_string(cfg.mode);
  m["backend"] = backend;
  m["base_camera"] = cfg.base_camera ? cfg.base_camera->value() : "";
  ordered_json order = ordered_json::array();
  for (const CameraId& c : cfg.camera_order) order.push_back(c.value());
  m["camera_order"] = std::move(order);
  m["t_r"] = cfg.schedule.base_limit;
  m["t_l"] = cfg.schedule.followup_limit;
  m["baseline_limit"] = cfg.schedule.baseline_limit;
  m["delta"] = cfg.similarity.delta;
  m["accumulation"] = to_string(cfg.accumulation.mode);
  m["max_context_chars"] = cfg.accumulation.max_context_chars;
  m["window_ms"] = cfg.segmenter.window_ms;
  m["change_threshold"] = cfg.segmenter.change_threshold;
  m["workers"] = cfg.workers;
  return m;
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::kMalformedRecord, std::string("report lacks \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kMalformedRecord, std::string("report field \"") + key + "\" has wrong type");
  }
}

}  // namespace

std::string report_to_json(const IngestionReport& report, const std::string& backend) {
  ordered_json root;
  root["metadata"] = metadata(report.config, backend);

  ordered_json doc = ordered_json::array();
  for (const DocumentEntry& e : report.document.entries) {
    ordered_json j;
    j["start_ms"] = e.start_ms;
    j["end_ms"] = e.end_ms;
    j["timestamp"] = format_timestamp(e.start_ms);
    j["text"] = e.body;
    doc.push_back(std::move(j));
  }
  root["document"] = std::move(doc);

  ordered_json segs = ordered_json::array();
  for (const NarrativeSegment& s : report.segments) {
    ordered_json j;
    j["clip_id"] = s.clip_id;
    j["camera"] = s.camera.value();
    j["base_clip_id"] = s.base_clip_id;
    j["role"] = to_string(s.role);
    j["start_ms"] = s.start_ms;
    j["text"] = s.text;
    j["max_output_tokens"] = s.max_output_tokens;
    j["prompt_tokens"] = s.prompt_tokens;
    j["output_tokens"] = s.output_tokens;
    j["latency_ms"] = s.latency_ms;
    j["skipped"] = s.skipped;
    if (s.similarity) j["similarity"] = *s.similarity;
    if (s.error) j["error"] = *s.error;
    segs.push_back(std::move(j));
  }
  root["segments"] = std::move(segs);

  ordered_json totals;
  totals["total_latency_ms"] = report.total_latency_ms;
  totals["parallel_latency_ms"] = report.parallel_latency_ms;
  totals["total_time"] = format_timestamp(report.total_latency_ms);
  totals["vlm_calls"] = report.vlm_calls;
  totals["skipped_clips"] = report.skipped_clips;
  totals["absent_pairs"] = report.absent_pairs;
  totals["failed_calls"] = report.failed_calls;
  root["totals"] = std::move(totals);
  return root.dump(2) + "\n";
}

void write_report_file(const IngestionReport& report, const std::string& path,
                       const std::string& backend) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write report: " + path);
  out << report_to_json(report, backend);
}

IngestionReport report_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kMalformedRecord, std::string("report is not JSON: ") + e.what());
  }
  IngestionReport r;
  const auto& meta = field<nlohmann::json>(root, "metadata");
  r.config.mode = ingest_mode_from_string(field<std::string>(meta, "mode"));
  if (auto base = field<std::string>(meta, "base_camera"); !base.empty()) {
    r.config.base_camera = CameraId(base);
  }
  for (const auto& c : field<std::vector<std::string>>(meta, "camera_order")) {
    r.config.camera_order.emplace_back(c);
  }
  r.config.schedule = {field<int>(meta, "t_r"), field<int>(meta, "t_l"),
                       field<int>(meta, "baseline_limit")};
  r.config.similarity.delta = field<double>(meta, "delta");
  r.config.accumulation.mode =
      accumulation_mode_from_string(field<std::string>(meta, "accumulation"));
  r.config.accumulation.max_context_chars = field<std::size_t>(meta, "max_context_chars");
  r.config.segmenter.window_ms = field<Millis>(meta, "window_ms");
  r.config.segmenter.change_threshold = field<double>(meta, "change_threshold");
  r.config.workers = field<int>(meta, "workers");

  for (const auto& e : field<nlohmann::json>(root, "document")) {
    r.document.entries.push_back(
        {field<Millis>(e, "start_ms"), field<Millis>(e, "end_ms"), field<std::string>(e, "text")});
  }
  for (const auto& j : field<nlohmann::json>(root, "segments")) {
    NarrativeSegment s;
    s.clip_id = field<int>(j, "clip_id");
    s.camera = CameraId(field<std::string>(j, "camera"));
    s.base_clip_id = field<int>(j, "base_clip_id");
    s.role = field<std::string>(j, "role") == "base" ? SegmentRole::kBase : SegmentRole::kFollowup;
    s.start_ms = field<Millis>(j, "start_ms");
    s.text = field<std::string>(j, "text");
    s.max_output_tokens = field<int>(j, "max_output_tokens");
    s.prompt_tokens = field<int>(j, "prompt_tokens");
    s.output_tokens = field<int>(j, "output_tokens");
    s.latency_ms = field<Millis>(j, "latency_ms");
    s.skipped = field<bool>(j, "skipped");
    if (j.contains("similarity")) s.similarity = field<double>(j, "similarity");
    if (j.contains("error")) s.error = field<std::string>(j, "error");
    r.segments.push_back(std::move(s));
  }
  const auto& totals = field<nlohmann::json>(root, "totals");
  r.total_latency_ms = field<Millis>(totals, "total_latency_ms");
  r.parallel_latency_ms = field<Millis>(totals, "parallel_latency_ms");
  r.vlm_calls = field<int>(totals, "vlm_calls");
  r.skipped_clips = field<int>(totals, "skipped_clips");
  r.absent_pairs = field<int>(totals, "absent_pairs");
  r.failed_calls = field<int>(totals, "failed_calls");
  return r;
}

IngestionReport read_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open report: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

}  // namespace trafficlens

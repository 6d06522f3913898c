#include "trafficlens/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace trafficlens {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kConfig, std::string("config key \"") + key + "\" has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kConfig, what); };
  if (backend != "mock" && backend != "http") fail("backend must be \"mock\" or \"http\"");
  try {
    schedule.validate();
    SimilarityConfig{delta}.validate();
    accumulation.validate();
    segmenter.validate();
    latency.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (chunk_max_chars == 0) fail("chunk_max_chars must be positive");
  if (k == 0) fail("k must be positive");
  if (answer_max_tokens < 1) fail("answer_max_tokens must be positive");
  if (workers < 1) fail("workers must be positive");
  if (fixture_clips < 1) fail("fixture_clips must be positive");
  for (const std::string& c : camera_order) {
    if (c.empty()) fail("camera_order entries must be non-empty");
  }
  if (base_camera && base_camera->empty()) fail("base_camera must be non-empty");
}

IngestionConfig RunConfig::ingestion() const {
  IngestionConfig cfg;
  cfg.mode = mode;
  if (base_camera) cfg.base_camera = CameraId(*base_camera);
  for (const std::string& c : camera_order) cfg.camera_order.emplace_back(c);
  cfg.schedule = schedule;
  cfg.similarity.delta = delta;
  cfg.accumulation = accumulation;
  cfg.segmenter = segmenter;
  cfg.workers = workers;
  return cfg;
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");

  RunConfig cfg;
  read(j, "backend", cfg.backend);
  read(j, "endpoint", cfg.endpoint);
  read(j, "model", cfg.model);
  std::string mode(to_string(cfg.mode));
  read(j, "mode", mode);
  cfg.mode = ingest_mode_from_string(mode);
  std::string base;
  read(j, "base_camera", base);
  if (!base.empty()) cfg.base_camera = base;
  read(j, "camera_order", cfg.camera_order);
  read(j, "t_r", cfg.schedule.base_limit);
  read(j, "t_l", cfg.schedule.followup_limit);
  read(j, "baseline_limit", cfg.schedule.baseline_limit);
  read(j, "delta", cfg.delta);
  std::string accumulation(to_string(cfg.accumulation.mode));
  read(j, "accumulation", accumulation);
  cfg.accumulation.mode = accumulation_mode_from_string(accumulation);
  read(j, "max_context_chars", cfg.accumulation.max_context_chars);
  read(j, "window_ms", cfg.segmenter.window_ms);
  read(j, "change_threshold", cfg.segmenter.change_threshold);
  read(j, "fixed_overhead_ms", cfg.latency.fixed_overhead_ms);
  read(j, "ms_per_token", cfg.latency.ms_per_token);
  read(j, "chunk_max_chars", cfg.chunk_max_chars);
  read(j, "k", cfg.k);
  read(j, "answer_max_tokens", cfg.answer_max_tokens);
  read(j, "workers", cfg.workers);
  read(j, "seed", cfg.seed);
  read(j, "fixture_clips", cfg.fixture_clips);
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Backends make_backends(const RunConfig& cfg) {
  Backends out;
  if (cfg.backend == "mock") {
    auto mock = std::make_shared<MockBackend>(cfg.latency);
    out.vision = mock;
    out.embedder = mock;
    out.llm = mock;
    return out;
  }
  HttpBackendConfig http = HttpBackendConfig::from_env();
  if (!cfg.endpoint.empty()) http.endpoint = cfg.endpoint;
  if (cfg.model != "default") {
    http.model = cfg.model;
    http.embedding_model = cfg.model;
  }
  if (http.endpoint.empty()) {
    throw Error(ErrorKind::kConfig, "http backend needs --endpoint or TRAFFICLENS_ENDPOINT");
  }
  auto backend = std::make_shared<HttpBackend>(std::move(http));
  out.vision = backend;
  out.embedder = backend;
  out.llm = backend;
  return out;
}

}  // namespace trafficlens

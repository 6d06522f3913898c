#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trafficlens/model_gateway.hpp"
#include "trafficlens/orchestrator.hpp"

namespace trafficlens {

// Top-level run configuration, read from a JSON file and then overridden by
// command-line flags. Keys mirror the field names below.
struct RunConfig {
  std::string backend = "mock";  // "mock" or "http"
  std::string endpoint;          // falls back to TRAFFICLENS_ENDPOINT
  std::string model = "default";
  IngestMode mode = IngestMode::kTrafficLens;
  std::optional<std::string> base_camera;
  std::vector<std::string> camera_order;
  TokenBudgetSchedule schedule;
  double delta = 0.21;
  AccumulationPolicy accumulation;
  SegmenterConfig segmenter;
  MockLatencyModel latency;
  std::size_t chunk_max_chars = 1200;
  std::size_t k = 4;
  int answer_max_tokens = 256;
  int workers = 1;
  std::uint64_t seed = 7;
  int fixture_clips = 200;

  /// Throws Error(kConfig) naming the first offending field.
  void validate() const;

  IngestionConfig ingestion() const;

  static RunConfig from_json(const std::string& text);
  static RunConfig load_file(const std::string& path);
};

/// Backend bundle for one command; the mock serves every role.
struct Backends {
  std::shared_ptr<VisionModel> vision;
  std::shared_ptr<EmbeddingModel> embedder;
  std::shared_ptr<LanguageModel> llm;
};

Backends make_backends(const RunConfig& cfg);

}  // namespace trafficlens

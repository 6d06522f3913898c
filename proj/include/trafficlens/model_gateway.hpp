#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trafficlens/core_types.hpp"
#include "trafficlens/prompts.hpp"

namespace trafficlens {

// Where a describe call sits in the ingestion run; used for logging and
// error context only, never by the models themselves.
struct CallTag {
  std::string camera;
  int clip_id = -1;
  int rank = 0;
};

struct DescribeRequest {
  std::optional<std::string> media_ref;
  std::vector<Detection> detections;  // consumed by the mock backend
  PromptText prompt;
  int max_output_tokens = 1;
  CallTag tag;
};

struct ModelUsage {
  int prompt_tokens = 0;
  int output_tokens = 0;
  Millis latency_ms = 0;
};

struct ModelReply {
  std::string text;
  ModelUsage usage;
};

class VisionModel {
 public:
  virtual ~VisionModel() = default;
  virtual ModelReply describe(const DescribeRequest& req) = 0;
};

class EmbeddingModel {
 public:
  virtual ~EmbeddingModel() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual std::size_t dimension() const = 0;
};

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual ModelReply complete(std::string_view prompt, int max_output_tokens) = 0;
};

// --- usage accounting --------------------------------------------------------

struct UsageTotals {
  std::int64_t calls = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t latency_ms = 0;

  double average_output_tokens() const noexcept {
    return calls == 0 ? 0.0 : static_cast<double>(output_tokens) / static_cast<double>(calls);
  }
};

UsageTotals record_call(UsageTotals totals, const ModelUsage& usage) noexcept;

/// Append-only log of model usages; appends are serialized.
class UsageLedger {
 public:
  void record(const ModelUsage& usage);
  UsageTotals totals() const;
  std::vector<ModelUsage> usages() const;

 private:
  mutable std::mutex mu_;
  std::vector<ModelUsage> usages_;
  UsageTotals totals_;
};

// --- deterministic mock -----------------------------------------------------

/// Simulated generation time: fixed overhead plus a constant cost per output token.
struct MockLatencyModel {
  Millis fixed_overhead_ms = 500;
  double ms_per_token = 50.0;

  void validate() const;
  Millis latency_ms(int output_tokens) const;
};

inline constexpr std::size_t kMockEmbeddingDim = 256;

std::vector<std::string> whitespace_tokens(std::string_view text);

/// Untruncated narrative the mock produces for a set of detections under a prompt.
/// Base prompts get "A {label} is visible near ({cx},{cy})." per detection;
/// follow-up prompts get "Undetected {label} at ({cx},{cy})." for labels the
/// bracketed context does not mention yet.
std::string mock_narrative(const std::vector<Detection>& detections, const PromptText& prompt);

/// L2-normalized hashed term frequencies (FNV-1a mod dim) over lowercase
/// alphanumeric tokens.
std::vector<double> hashed_embedding(std::string_view text, std::size_t dim = kMockEmbeddingDim);

/// Extractive answer over a "Context: ... Question: ..." prompt.
std::string mock_answer(std::string_view prompt);

/// Pure, thread-safe backend for all three model roles. Latency is accounted
/// on a logical clock; nothing sleeps.
class MockBackend final : public VisionModel, public EmbeddingModel, public LanguageModel {
 public:
  explicit MockBackend(MockLatencyModel latency = {});

  ModelReply describe(const DescribeRequest& req) override;
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override { return kMockEmbeddingDim; }
  ModelReply complete(std::string_view prompt, int max_output_tokens) override;

  const MockLatencyModel& latency_model() const noexcept { return latency_; }

  /// Every describe request seen so far, in arrival order.
  std::vector<DescribeRequest> requests() const;

 private:
  MockLatencyModel latency_;
  mutable std::mutex mu_;
  std::vector<DescribeRequest> requests_;
};

// --- OpenAI-compatible HTTP ---------------------------------------------------

struct HttpBackendConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8000"
  std::optional<std::string> api_key;
  std::string model = "default";
  std::string embedding_model = "default";
  int timeout_ms = 60000;

  /// Reads TRAFFICLENS_ENDPOINT, TRAFFICLENS_API_KEY and TRAFFICLENS_MODEL.
  static HttpBackendConfig from_env();
};

/// Speaks POST /v1/chat/completions (and /v1/embeddings for embed).
class HttpBackend final : public VisionModel, public EmbeddingModel, public LanguageModel {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);
  ~HttpBackend() override;

  ModelReply describe(const DescribeRequest& req) override;
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override;
  ModelReply complete(std::string_view prompt, int max_output_tokens) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trafficlens

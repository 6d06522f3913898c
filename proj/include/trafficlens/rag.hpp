#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trafficlens/core_types.hpp"
#include "trafficlens/model_gateway.hpp"

namespace trafficlens {

struct KnowledgeChunk {
  int chunk_id = 0;
  std::string text;
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::optional<std::vector<double>> embedding;
};

/// Exact-scan vector store. Embeddings are kept L2-normalized in one
/// row-major buffer; chunk order is insertion order.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dimension);

  /// Takes ownership of a chunk whose embedding has this index's dimension.
  void add(KnowledgeChunk chunk);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return chunks_.size(); }
  bool empty() const noexcept { return chunks_.empty(); }
  const std::vector<KnowledgeChunk>& chunks() const noexcept { return chunks_; }
  std::span<const double> vectors() const noexcept { return vectors_; }
  std::span<const Millis> start_times() const noexcept { return starts_; }

  /// Header line {"dim":D,"count":N}, then one JSON record per chunk.
  void save(std::ostream& out) const;
  static VectorIndex load(std::istream& in);
  void save_file(const std::string& path) const;
  static VectorIndex load_file(const std::string& path);

 private:
  std::size_t dim_;
  std::vector<KnowledgeChunk> chunks_;
  std::vector<double> vectors_;
  std::vector<Millis> starts_;
};

struct RetrievalResult {
  KnowledgeChunk chunk;
  double score = 0.0;
};

struct Answer {
  std::string text;
  std::vector<RetrievalResult> used_chunks;
  std::string prompt;
};

/// Splits text into sentences, each keeping its trailing whitespace, so the
/// pieces concatenate back to the input.
std::vector<std::string> split_sentences_exact(std::string_view text);

/// One chunk per document entry; entries over `max_chars` split at sentence
/// boundaries into consecutive chunks that share the entry's time range.
std::vector<KnowledgeChunk> chunk_document(const IntersectionDocument& doc,
                                           std::size_t max_chars = 1200);

VectorIndex build_index(std::vector<KnowledgeChunk> chunks, EmbeddingModel& embedder,
                        int workers = 1);

/// Exact top-k by cosine similarity; ties go to the earlier start time.
std::vector<RetrievalResult> retrieve(std::string_view query, const VectorIndex& index,
                                      EmbeddingModel& embedder, std::size_t k = 4);
std::vector<RetrievalResult> retrieve_by_vector(std::span<const double> query,
                                                const VectorIndex& index, std::size_t k = 4);

std::string answer_prompt(std::string_view query, std::span<const RetrievalResult> context);

Answer answer(std::string_view query, const VectorIndex& index, std::size_t k,
              EmbeddingModel& embedder, LanguageModel& llm, int max_output_tokens = 256);

}  // namespace trafficlens

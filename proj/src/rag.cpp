#include "trafficlens/rag.hpp"

#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "trafficlens/kernels.hpp"
#include "trafficlens/prompts.hpp"

namespace trafficlens {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Cuts an over-long sentence into word-bounded pieces of at most max_chars.
void split_long(std::string_view piece, std::size_t max_chars, std::vector<std::string>& out) {
  while (piece.size() > max_chars) {
    std::string head = truncate_at_word(piece, max_chars);
    // Keep the whitespace after the cut with the head so nothing is lost.
    std::size_t n = head.size();
    while (n < piece.size() && n < max_chars && is_space(piece[n])) ++n;
    if (n == 0) n = std::min(max_chars, piece.size());
    out.emplace_back(piece.substr(0, n));
    piece.remove_prefix(n);
  }
  if (!piece.empty()) out.emplace_back(piece);
}

}  // namespace

VectorIndex::VectorIndex(std::size_t dimension) : dim_(dimension) {
  if (dim_ == 0) throw Error(ErrorKind::kInvalidArgument, "index dimension must be positive");
}

void VectorIndex::add(KnowledgeChunk chunk) {
  if (!chunk.embedding || chunk.embedding->size() != dim_) {
    throw Error(ErrorKind::kInvalidArgument,
                "chunk " + std::to_string(chunk.chunk_id) + " has no embedding of dimension " +
                    std::to_string(dim_));
  }
  if (chunk.text.empty() || chunk.start_ms > chunk.end_ms) {
    throw Error(ErrorKind::kInvalidArgument, "chunk " + std::to_string(chunk.chunk_id) + " is invalid");
  }
  std::vector<double>& v = *chunk.embedding;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw Error(ErrorKind::kInvalidArgument, "zero embedding");
  if (std::fabs(norm - 1.0) > 1e-12) {
    for (double& x : v) x /= norm;
  }
  vectors_.insert(vectors_.end(), v.begin(), v.end());
  starts_.push_back(chunk.start_ms);
  chunks_.push_back(std::move(chunk));
}

void VectorIndex::save(std::ostream& out) const {
  ordered_json header;
  header["dim"] = dim_;
  header["count"] = chunks_.size();
  out << header.dump() << '\n';
  for (const KnowledgeChunk& c : chunks_) {
    ordered_json j;
    j["id"] = c.chunk_id;
    j["start_ms"] = c.start_ms;
    j["end_ms"] = c.end_ms;
    j["text"] = c.text;
    j["vec"] = *c.embedding;
    out << j.dump() << '\n';
  }
}

VectorIndex VectorIndex::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kMalformedRecord, "index file is empty");
  try {
    const auto header = nlohmann::json::parse(line);
    VectorIndex index(header.at("dim").get<std::size_t>());
    const auto count = header.at("count").get<std::size_t>();
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) {
        throw Error(ErrorKind::kMalformedRecord,
                    "index declares " + std::to_string(count) + " entries, found " + std::to_string(i));
      }
      const auto j = nlohmann::json::parse(line);
      KnowledgeChunk c;
      c.chunk_id = j.at("id").get<int>();
      c.start_ms = j.at("start_ms").get<Millis>();
      c.end_ms = j.at("end_ms").get<Millis>();
      c.text = j.at("text").get<std::string>();
      c.embedding = j.at("vec").get<std::vector<double>>();
      index.add(std::move(c));
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kMalformedRecord, std::string("bad index record: ") + e.what());
  }
}

void VectorIndex::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write index: " + path);
  save(out);
}

VectorIndex VectorIndex::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open index: " + path);
  return load(in);
}

std::vector<std::string> split_sentences_exact(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i++];
    if ((c == '.' || c == '!' || c == '?') && (i == text.size() || is_space(text[i]))) {
      while (i < text.size() && is_space(text[i])) ++i;
      out.emplace_back(text.substr(start, i - start));
      start = i;
    }
  }
  if (start < text.size()) out.emplace_back(text.substr(start));
  return out;
}

std::vector<KnowledgeChunk> chunk_document(const IntersectionDocument& doc, std::size_t max_chars) {
  if (doc.empty()) throw Error(ErrorKind::kEmptyDocument, "document has no entries");
  if (max_chars == 0) throw Error(ErrorKind::kInvalidArgument, "max_chars must be positive");

  std::vector<KnowledgeChunk> chunks;
  auto emit = [&](std::string text, const DocumentEntry& e) {
    chunks.push_back({static_cast<int>(chunks.size()), std::move(text), e.start_ms, e.end_ms, {}});
  };
  for (const DocumentEntry& entry : doc.entries) {
    if (entry.body.empty()) continue;
    if (entry.body.size() <= max_chars) {
      emit(entry.body, entry);
      continue;
    }
    std::vector<std::string> pieces;
    for (const std::string& s : split_sentences_exact(entry.body)) split_long(s, max_chars, pieces);
    std::string current;
    for (std::string& p : pieces) {
      if (!current.empty() && current.size() + p.size() > max_chars) {
        emit(std::move(current), entry);
        current.clear();
      }
      current += p;
    }
    if (!current.empty()) emit(std::move(current), entry);
  }
  if (chunks.empty()) throw Error(ErrorKind::kEmptyDocument, "document has no text");
  return chunks;
}

VectorIndex build_index(std::vector<KnowledgeChunk> chunks, EmbeddingModel& embedder, int workers) {
  if (chunks.empty()) throw Error(ErrorKind::kEmptyDocument, "no chunks to index");
  const auto n = static_cast<std::ptrdiff_t>(chunks.size());
  std::vector<std::exception_ptr> errors(chunks.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(std::max(1, workers)) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      chunks[i].embedding = embedder.embed(chunks[i].text);
    } catch (const Error& e) {
      errors[i] = std::make_exception_ptr(
          Error(e.kind(), "chunk " + std::to_string(chunks[i].chunk_id) + ": " + e.what()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  VectorIndex index(chunks.front().embedding->size());
  for (KnowledgeChunk& c : chunks) index.add(std::move(c));
  return index;
}

std::vector<RetrievalResult> retrieve_by_vector(std::span<const double> query,
                                                const VectorIndex& index, std::size_t k) {
  if (index.empty()) throw Error(ErrorKind::kEmptyIndex, "index has no entries");
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be positive");
  const std::vector<double> scores = kernels::cosine_scores(index.vectors(), index.dimension(), query);
  std::vector<RetrievalResult> out;
  for (std::size_t i : kernels::top_k(scores, k, index.start_times())) {
    out.push_back({index.chunks()[i], scores[i]});
  }
  return out;
}

std::vector<RetrievalResult> retrieve(std::string_view query, const VectorIndex& index,
                                      EmbeddingModel& embedder, std::size_t k) {
  if (index.empty()) throw Error(ErrorKind::kEmptyIndex, "index has no entries");
  const std::vector<double> q = embedder.embed(query);
  if (q.size() != index.dimension()) {
    throw Error(ErrorKind::kInvalidArgument, "query embedding dimension differs from index");
  }
  return retrieve_by_vector(q, index, k);
}

std::string answer_prompt(std::string_view query, std::span<const RetrievalResult> context) {
  std::string prompt = "Context:\n";
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i > 0) prompt += '\n';
    prompt += format_timestamp(context[i].chunk.start_ms) + " : " + context[i].chunk.text;
  }
  prompt += "\n\nQuestion: ";
  prompt += query;
  prompt += "\nAnswer using only the context.";
  return prompt;
}

Answer answer(std::string_view query, const VectorIndex& index, std::size_t k,
              EmbeddingModel& embedder, LanguageModel& llm, int max_output_tokens) {
  Answer out;
  out.used_chunks = retrieve(query, index, embedder, k);
  out.prompt = answer_prompt(query, out.used_chunks);
  out.text = llm.complete(out.prompt, max_output_tokens).text;
  return out;
}

}  // namespace trafficlens

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>

#include "trafficlens/model_gateway.hpp"

namespace trafficlens {
namespace {

// Lowercases and maps every non-alphanumeric byte to a single space, padded
// with spaces on both ends so whole-word lookups are plain substring searches.
std::string normalize_words(std::string_view text) {
  std::string out = " ";
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (out.back() != ' ') {
      out += ' ';
    }
  }
  if (out.back() != ' ') out += ' ';
  return out;
}

std::vector<std::string> alnum_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return h;
}

std::string_view followup_context(std::string_view prompt) {
  if (!prompt.starts_with(kFollowupPrefix)) return prompt;
  const auto end = prompt.rfind(kFollowupSuffix);
  if (end == std::string_view::npos || end < kFollowupPrefix.size()) return prompt;
  return prompt.substr(kFollowupPrefix.size(), end - kFollowupPrefix.size());
}

std::vector<const Detection*> ordered(const std::vector<Detection>& detections) {
  std::vector<const Detection*> out;
  for (const Detection& d : detections) out.push_back(&d);
  std::stable_sort(out.begin(), out.end(), [](const Detection* a, const Detection* b) {
    if (a->label != b->label) return a->label < b->label;
    if (a->box.center_x() != b->box.center_x()) return a->box.center_x() < b->box.center_x();
    return a->box.center_y() < b->box.center_y();
  });
  return out;
}

std::string position(const Detection& d) {
  return "(" + std::to_string(std::llround(d.box.center_x())) + "," +
         std::to_string(std::llround(d.box.center_y())) + ")";
}

std::string join_first(const std::vector<std::string>& tokens, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < std::min(n, tokens.size()); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",     "an",   "and",  "any",   "are",  "as",    "at",   "be",   "by",
      "can",   "did",  "do",   "does",  "for",  "from",  "has",  "have", "how",
      "i",     "in",   "is",   "it",    "its",  "many",  "me",   "of",   "on",
      "or",    "see",  "seen", "some",  "that", "the",   "there", "this", "to",
      "visible", "was", "were", "what", "when", "where", "which", "who",  "with",
      "you",   "near"};
  return words;
}

std::string stem(std::string token) {
  if (token.size() > 3 && token.back() == 's' && token[token.size() - 2] != 's') {
    token.pop_back();
  }
  return token;
}

std::set<std::string> content_terms(std::string_view text) {
  std::set<std::string> terms;
  for (std::string& t : alnum_tokens(text)) {
    if (!stopwords().contains(t)) terms.insert(stem(std::move(t)));
  }
  return terms;
}

bool is_timestamp_header(std::string_view line) {
  // "HH:MM:SS :" with any number of hour digits.
  const auto colon = line.find(" :");
  if (colon == std::string_view::npos || colon < 8) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    const char c = line[i];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == ':')) return false;
  }
  return true;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool terminal = c == '.' || c == '!' || c == '?';
    if (terminal && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      std::string_view s = text.substr(start, i + 1 - start);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      if (!s.empty()) out.emplace_back(s);
      start = i + 1;
    }
  }
  std::string_view rest = text.substr(std::min(start, text.size()));
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  if (!rest.empty()) out.emplace_back(rest);
  return out;
}

}  // namespace

void MockLatencyModel::validate() const {
  if (fixed_overhead_ms < 0) {
    throw Error(ErrorKind::kInvalidArgument, "fixed_overhead_ms must be non-negative");
  }
  if (!(ms_per_token > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "ms_per_token must be positive");
  }
}

Millis MockLatencyModel::latency_ms(int output_tokens) const {
  return fixed_overhead_ms + std::llround(ms_per_token * output_tokens);
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::string mock_narrative(const std::vector<Detection>& detections, const PromptText& prompt) {
  std::string out;
  auto append = [&out](const std::string& sentence) {
    if (!out.empty()) out += ' ';
    out += sentence;
  };

  if (prompt.role != PromptRole::kFollowup) {
    if (detections.empty()) return "No objects are visible.";
    for (const Detection* d : ordered(detections)) {
      append("A " + d->label + " is visible near " + position(*d) + ".");
    }
    return out;
  }

  const std::string context = normalize_words(followup_context(prompt.text));
  for (const Detection* d : ordered(detections)) {
    const std::string label = normalize_words(d->label);
    if (label.size() > 2 && context.find(label) != std::string::npos) continue;
    append("Undetected " + d->label + " at " + position(*d) + ".");
  }
  return out;
}

std::vector<double> hashed_embedding(std::string_view text, std::size_t dim) {
  std::vector<std::string> tokens = alnum_tokens(text);
  if (tokens.empty()) {
    // Punctuation-only input still maps to a unit vector.
    tokens.emplace_back(text);
  }
  std::vector<double> v(dim, 0.0);
  for (const std::string& t : tokens) v[fnv1a(t) % dim] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::string mock_answer(std::string_view prompt) {
  static constexpr std::string_view kContext = "Context:\n";
  static constexpr std::string_view kQuestion = "\n\nQuestion: ";

  std::string_view context;
  std::string_view question = prompt;
  if (const auto q = prompt.find(kQuestion); q != std::string_view::npos) {
    question = prompt.substr(q + kQuestion.size());
    question = question.substr(0, question.find('\n'));
    context = prompt.substr(0, q);
    if (context.starts_with(kContext)) context.remove_prefix(kContext.size());
  }

  const std::set<std::string> query = content_terms(question);
  std::vector<std::pair<std::size_t, std::string>> scored;
  std::size_t best = 0;
  std::istringstream lines{std::string(context)};
  std::string line;
  while (std::getline(lines, line)) {
    std::string_view body = line;
    if (is_timestamp_header(body)) body.remove_prefix(body.find(" :") + 2);
    for (std::string& sentence : split_sentences(body)) {
      std::size_t overlap = 0;
      for (const std::string& t : content_terms(sentence)) overlap += query.contains(t);
      best = std::max(best, overlap);
      scored.emplace_back(overlap, std::move(sentence));
    }
  }
  if (best == 0) return "No relevant information found.";

  std::string answer = "Yes, ";
  std::set<std::string> seen;
  bool first = true;
  for (auto& [overlap, sentence] : scored) {
    if (overlap != best || !seen.insert(sentence).second) continue;
    if (first) {
      if (sentence.size() > 1 && std::isupper(static_cast<unsigned char>(sentence[0])) &&
          !std::isupper(static_cast<unsigned char>(sentence[1]))) {
        sentence[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sentence[0])));
      }
      first = false;
    } else {
      answer += ' ';
    }
    answer += sentence;
  }
  return answer;
}

MockBackend::MockBackend(MockLatencyModel latency) : latency_(latency) { latency_.validate(); }

ModelReply MockBackend::describe(const DescribeRequest& req) {
  if (req.max_output_tokens < 1) {
    throw Error(ErrorKind::kBudgetInvalid, "max_output_tokens must be >= 1");
  }
  {
    std::lock_guard lock(mu_);
    requests_.push_back(req);
  }
  const auto tokens = whitespace_tokens(mock_narrative(req.detections, req.prompt));
  ModelReply reply;
  reply.text = join_first(tokens, static_cast<std::size_t>(req.max_output_tokens));
  reply.usage.prompt_tokens = static_cast<int>(whitespace_tokens(req.prompt.text).size());
  reply.usage.output_tokens =
      static_cast<int>(std::min<std::size_t>(tokens.size(), req.max_output_tokens));
  reply.usage.latency_ms = latency_.latency_ms(reply.usage.output_tokens);
  return reply;
}

std::vector<double> MockBackend::embed(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::kEmptyText, "cannot embed empty text");
  return hashed_embedding(text, kMockEmbeddingDim);
}

ModelReply MockBackend::complete(std::string_view prompt, int max_output_tokens) {
  if (prompt.empty()) throw Error(ErrorKind::kEmptyText, "empty completion prompt");
  if (max_output_tokens < 1) {
    throw Error(ErrorKind::kBudgetInvalid, "max_output_tokens must be >= 1");
  }
  const auto tokens = whitespace_tokens(mock_answer(prompt));
  ModelReply reply;
  reply.text = join_first(tokens, static_cast<std::size_t>(max_output_tokens));
  reply.usage.prompt_tokens = static_cast<int>(whitespace_tokens(prompt).size());
  reply.usage.output_tokens =
      static_cast<int>(std::min<std::size_t>(tokens.size(), max_output_tokens));
  reply.usage.latency_ms = latency_.latency_ms(reply.usage.output_tokens);
  return reply;
}

std::vector<DescribeRequest> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace trafficlens

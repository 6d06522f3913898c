#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "trafficlens/model_gateway.hpp"

namespace trafficlens {
namespace {

using nlohmann::json;

struct Endpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

Endpoint split_endpoint(const std::string& url) {
  if (url.empty()) throw Error(ErrorKind::kConfig, "HTTP backend needs an endpoint URL");
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint ep{url.substr(0, path), path == std::string::npos ? "" : url.substr(path)};
  while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
  if (ep.path_prefix.ends_with("/v1")) ep.path_prefix.resize(ep.path_prefix.size() - 3);
  return ep;
}

std::string image_url(const std::string& media_ref) {
  if (media_ref.starts_with("http://") || media_ref.starts_with("https://") ||
      media_ref.starts_with("data:")) {
    return media_ref;
  }
  std::ifstream in(media_ref, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read frame image: " + media_ref);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  const bool png = media_ref.ends_with(".png") || media_ref.ends_with(".PNG");
  return std::string("data:image/") + (png ? "png" : "jpeg") + ";base64," +
         httplib::detail::base64_encode(bytes.str());
}

std::string message_text(const json& content) {
  if (content.is_string()) return content.get<std::string>();
  std::string out;
  if (content.is_array()) {
    for (const json& part : content) {
      if (part.contains("text") && part["text"].is_string()) out += part["text"].get<std::string>();
    }
  }
  return out;
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig cfg;
  if (const char* v = std::getenv("TRAFFICLENS_ENDPOINT")) cfg.endpoint = v;
  if (const char* v = std::getenv("TRAFFICLENS_API_KEY"); v && *v) cfg.api_key = v;
  if (const char* v = std::getenv("TRAFFICLENS_MODEL"); v && *v) {
    cfg.model = v;
    cfg.embedding_model = v;
  }
  return cfg;
}

struct HttpBackend::Impl {
  HttpBackendConfig cfg;
  Endpoint endpoint;
  std::atomic<std::size_t> dimension{0};

  // httplib clients are not shareable across threads; one per call.
  json post(const std::string& route, const json& body) {
    httplib::Client client(endpoint.scheme_host_port);
    if (!client.is_valid()) {
      throw Error(ErrorKind::kBackendUnreachable, "unsupported endpoint: " + cfg.endpoint);
    }
    const auto timeout = std::chrono::milliseconds(cfg.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (cfg.api_key) headers.emplace("Authorization", "Bearer " + *cfg.api_key);

    auto res = client.Post(endpoint.path_prefix + route, headers, body.dump(), "application/json");
    if (!res) {
      throw Error(ErrorKind::kBackendUnreachable,
                  "backend unreachable at " + cfg.endpoint + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) throw BackendError(res->status, res->body);
    try {
      return json::parse(res->body);
    } catch (const json::parse_error&) {
      throw BackendError(res->status, "unparseable response body: " + res->body);
    }
  }

  ModelReply chat(json content, int max_output_tokens) {
    if (max_output_tokens < 1) {
      throw Error(ErrorKind::kBudgetInvalid, "max_output_tokens must be >= 1");
    }
    json body = {{"model", cfg.model},
                 {"max_tokens", max_output_tokens},
                 {"messages", json::array({{{"role", "user"}, {"content", std::move(content)}}})}};
    const auto start = std::chrono::steady_clock::now();
    json res = post("/v1/chat/completions", body);
    const auto elapsed = std::chrono::steady_clock::now() - start;

    ModelReply reply;
    try {
      reply.text = message_text(res.at("choices").at(0).at("message").at("content"));
    } catch (const json::exception&) {
      throw BackendError(200, "response lacks choices[0].message.content: " + res.dump());
    }
    const json usage = res.value("usage", json::object());
    reply.usage.prompt_tokens = usage.value("prompt_tokens", 0);
    reply.usage.output_tokens =
        usage.value("completion_tokens", static_cast<int>(whitespace_tokens(reply.text).size()));
    reply.usage.output_tokens = std::clamp(reply.usage.output_tokens, 0, max_output_tokens);
    reply.usage.latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    return reply;
  }
};

HttpBackend::HttpBackend(HttpBackendConfig cfg) : impl_(std::make_unique<Impl>()) {
  impl_->endpoint = split_endpoint(cfg.endpoint);
  impl_->cfg = std::move(cfg);
}

HttpBackend::~HttpBackend() = default;

ModelReply HttpBackend::describe(const DescribeRequest& req) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", req.prompt.text}});
  if (req.media_ref) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_url(*req.media_ref)}}}});
  }
  return impl_->chat(std::move(content), req.max_output_tokens);
}

ModelReply HttpBackend::complete(std::string_view prompt, int max_output_tokens) {
  if (prompt.empty()) throw Error(ErrorKind::kEmptyText, "empty completion prompt");
  json content = json::array({{{"type", "text"}, {"text", std::string(prompt)}}});
  return impl_->chat(std::move(content), max_output_tokens);
}

std::vector<double> HttpBackend::embed(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::kEmptyText, "cannot embed empty text");
  json res = impl_->post("/v1/embeddings",
                         {{"model", impl_->cfg.embedding_model}, {"input", std::string(text)}});
  std::vector<double> v;
  try {
    v = res.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw BackendError(200, "response lacks data[0].embedding");
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (v.empty() || norm == 0.0) throw BackendError(200, "empty embedding vector");
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  impl_->dimension = v.size();
  return v;
}

std::size_t HttpBackend::dimension() const { return impl_->dimension; }

}  // namespace trafficlens

#include "doctest.h"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "trafficlens/model_gateway.hpp"

using namespace trafficlens;
using nlohmann::json;

namespace {

// Local server on an ephemeral port, stopped on scope exit.
struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
  ~TestServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

HttpBackendConfig config_for(const TestServer& s, int timeout_ms = 5000) {
  HttpBackendConfig cfg;
  cfg.endpoint = s.url();
  cfg.model = "vlm-test";
  cfg.timeout_ms = timeout_ms;
  return cfg;
}

}  // namespace

TEST_CASE("chat-completions request and response subset") {
  TestServer s;
  json seen;
  std::string auth;
  s.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"A red car waits."}}],)"
                    R"("usage":{"prompt_tokens":9,"completion_tokens":4}})",
                    "application/json");
  });
  s.start();

  auto cfg = config_for(s);
  cfg.api_key = "secret";
  HttpBackend backend(cfg);
  DescribeRequest req;
  req.media_ref = "https://example.test/frame.jpg";
  req.prompt = base_prompt();
  req.max_output_tokens = 80;
  const auto reply = backend.describe(req);

  CHECK(reply.text == "A red car waits.");
  CHECK(reply.usage.output_tokens == 4);
  CHECK(reply.usage.prompt_tokens == 9);
  CHECK(auth == "Bearer secret");
  CHECK(seen["model"] == "vlm-test");
  CHECK(seen["max_tokens"] == 80);
  const auto& content = seen["messages"][0]["content"];
  CHECK(seen["messages"][0]["role"] == "user");
  CHECK(content[0]["type"] == "text");
  CHECK(content[0]["text"] == "Compose a descriptive narrative.");
  CHECK(content[1]["type"] == "image_url");
  CHECK(content[1]["image_url"]["url"] == "https://example.test/frame.jpg");
}

TEST_CASE("server error becomes BackendError with status and body") {
  TestServer s;
  s.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("model crashed", "text/plain");
  });
  s.start();
  HttpBackend backend(config_for(s));
  try {
    backend.complete("hello", 16);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == ErrorKind::kBackendError);
    CHECK(e.status() == 500);
    CHECK(e.body() == "model crashed");
  }
}

TEST_CASE("timeout becomes backend-unreachable") {
  TestServer s;
  s.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content("{}", "application/json");
  });
  s.start();
  HttpBackend backend(config_for(s, 200));
  try {
    backend.complete("hello", 16);
    FAIL("expected unreachable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBackendUnreachable);
  }
}

TEST_CASE("nothing listening is backend-unreachable") {
  HttpBackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1";
  cfg.timeout_ms = 500;
  HttpBackend backend(cfg);
  try {
    backend.complete("hello", 16);
    FAIL("expected unreachable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBackendUnreachable);
  }
}

TEST_CASE("embeddings endpoint") {
  TestServer s;
  s.server.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data":[{"embedding":[3.0,4.0]}]})", "application/json");
  });
  s.start();
  auto cfg = config_for(s);
  cfg.endpoint += "/v1";
  HttpBackend backend(cfg);
  const auto v = backend.embed("white SUV");
  REQUIRE(v.size() == 2);
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
  CHECK(backend.dimension() == 2);
}

#include <doctest.h>

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "stableval/engine.hpp"
#include "stableval/errors.hpp"

using namespace stableval;
using nlohmann::json;

namespace {

rendered_prompt probe_prompt() {
  rendered_prompt p;
  p.text = "What is 2 + 2?";
  p.integer_answer = 4;
  return p;
}

json ok_body(const std::string& content, const std::string& finish = "stop") {
  return json{{"choices", json::array({json{{"message", json{{"role", "assistant"},
                                                             {"content", content}}},
                                            {"finish_reason", finish}}})},
              {"usage", json{{"prompt_tokens", 12}, {"completion_tokens", 34}}}};
}

// one localhost server per test, torn down with the fixture
class test_server {
 public:
  test_server() { port_ = server_.bind_to_any_port("127.0.0.1"); }

  ~test_server() { stop(); }

  void start() {
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

  std::string base_url(const std::string& prefix = "/v1") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }

  httplib::Server& raw() { return server_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

endpoint_config config_for(const test_server& server, int max_retries = 1) {
  endpoint_config cfg;
  cfg.base_url = server.base_url();
  cfg.model = "test-model";
  cfg.api_key = "secret-key";
  cfg.max_retries = max_retries;
  cfg.timeout_seconds = 5;
  return cfg;
}

}  // namespace

TEST_SUITE("http") {

TEST_CASE("a successful response maps onto a completion") {
  test_server server;
  std::string captured_body;
  std::string captured_auth;
  server.raw().Post("/v1/chat/completions",
                    [&](const httplib::Request& req, httplib::Response& res) {
                      captured_body = req.body;
                      captured_auth = req.get_header_value("Authorization");
                      res.set_content(ok_body("the answer is \\boxed{4}").dump(),
                                      "application/json");
                    });
  server.start();

  http_backend backend(config_for(server));
  backend.sleeper = [](long) {};
  sampling_params params;
  params.top_k = 30;
  params.presence_penalty = 1.0;
  attempt_context ctx{"s1", 3, 87654321};

  const completion done = backend.complete(probe_prompt(), params, ctx);
  CHECK(done.text == "the answer is \\boxed{4}");
  CHECK(done.finish == finish_reason::stop);
  CHECK(done.prompt_tokens == 12);
  CHECK(done.completion_tokens == 34);
  CHECK(captured_auth == "Bearer secret-key");

  const json payload = json::parse(captured_body);
  CHECK(payload["model"] == "test-model");
  CHECK(payload["seed"] == 87654321);
  CHECK(payload["temperature"] == 0.6);
  CHECK(payload["top_p"] == 0.95);
  CHECK(payload["top_k"] == 30);
  CHECK(payload["presence_penalty"] == 1.0);
  CHECK_FALSE(payload.contains("min_p"));
  CHECK(payload["max_tokens"] == 32768);
  REQUIRE(payload["messages"].size() == 1);
  CHECK(payload["messages"][0]["role"] == "user");
  CHECK(payload["messages"][0]["content"] == "What is 2 + 2?");
}

TEST_CASE("finish_reason length is preserved") {
  test_server server;
  server.raw().Post("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      res.set_content(ok_body("ran out", "length").dump(), "application/json");
                    });
  server.start();
  http_backend backend(config_for(server));
  backend.sleeper = [](long) {};
  const completion done = backend.complete(probe_prompt(), {}, {"s1", 0, 1});
  CHECK(done.finish == finish_reason::length);
}

TEST_CASE("retryable statuses are retried with backoff") {
  test_server server;
  std::atomic<int> hits{0};
  server.raw().Post("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      if (hits.fetch_add(1) < 2) {
                        res.status = 429;
                        res.set_content("slow down", "text/plain");
                      } else {
                        res.set_content(ok_body("ok \\boxed{4}").dump(), "application/json");
                      }
                    });
  server.start();

  http_backend backend(config_for(server, 3));
  std::vector<long> delays;
  backend.sleeper = [&delays](long ms) { delays.push_back(ms); };
  const completion done = backend.complete(probe_prompt(), {}, {"s1", 0, 1});
  CHECK(done.text == "ok \\boxed{4}");
  CHECK(hits.load() == 3);
  REQUIRE(delays.size() == 2);
  CHECK(delays[0] == 250);
  CHECK(delays[1] == 500);
}

TEST_CASE("a permanent client error stops immediately") {
  test_server server;
  std::atomic<int> hits{0};
  server.raw().Post("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      hits.fetch_add(1);
                      res.status = 400;
                      res.set_content("bad request", "text/plain");
                    });
  server.start();
  http_backend backend(config_for(server, 3));
  backend.sleeper = [](long) {};
  CHECK_THROWS_AS(backend.complete(probe_prompt(), {}, {"s1", 0, 1}), config_error);
  CHECK(hits.load() == 1);
}

TEST_CASE("exhausted retries after malformed bodies yield an error completion") {
  test_server server;
  std::atomic<int> hits{0};
  server.raw().Post("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      hits.fetch_add(1);
                      res.set_content("{ not json", "application/json");
                    });
  server.start();
  http_backend backend(config_for(server, 2));
  backend.sleeper = [](long) {};
  const completion done = backend.complete(probe_prompt(), {}, {"s1", 0, 1});
  CHECK(done.finish == finish_reason::error);
  CHECK(done.text.empty());
  CHECK(hits.load() == 3);  // initial try plus two retries
}

TEST_CASE("a dead endpoint raises a transport error") {
  std::string dead_url;
  {
    test_server server;
    server.start();
    dead_url = server.base_url();
  }
  endpoint_config cfg;
  cfg.base_url = dead_url;
  cfg.model = "test-model";
  cfg.max_retries = 1;
  cfg.timeout_seconds = 5;
  http_backend backend(cfg);
  backend.sleeper = [](long) {};
  CHECK_THROWS_AS(backend.complete(probe_prompt(), {}, {"s1", 0, 1}), transport_error);
}

TEST_CASE("config validation happens up front") {
  endpoint_config empty_url;
  empty_url.model = "m";
  CHECK_THROWS_AS(http_backend{empty_url}, config_error);

  endpoint_config no_model;
  no_model.base_url = "http://127.0.0.1:1/v1";
  CHECK_THROWS_AS(http_backend{no_model}, config_error);

  endpoint_config negative;
  negative.base_url = "http://127.0.0.1:1/v1";
  negative.model = "m";
  negative.max_retries = -1;
  CHECK_THROWS_AS(http_backend{negative}, config_error);
}

TEST_CASE("a base url without a scheme is rejected") {
  endpoint_config cfg;
  cfg.base_url = "127.0.0.1:9/v1";
  cfg.model = "m";
  http_backend backend(cfg);
  backend.sleeper = [](long) {};
  CHECK_THROWS_AS(backend.complete(probe_prompt(), {}, {"s1", 0, 1}), config_error);
}

}  // TEST_SUITE

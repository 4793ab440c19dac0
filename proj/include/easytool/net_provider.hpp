#pragma once

// Network-backed completion provider speaking the common chat-completion
// wire contract. The request/response bodies are an opaque adapter boundary;
// nothing else in the toolkit knows about HTTP.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "easytool/error.hpp"
#include "easytool/provider.hpp"

namespace easytool {

struct NetworkProviderConfig {
  std::string endpoint;        // e.g. http://localhost:8000
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string credential_env;  // name of the env var holding the API key
};

class NetworkProvider : public CompletionProvider {
 public:
  explicit NetworkProvider(NetworkProviderConfig config) : config_(std::move(config)) {
    if (config_.endpoint.rfind("https://", 0) == 0)
      throw Error(ErrorCode::ConfigError,
                  "built without TLS support; use an http:// endpoint or a local proxy");
    if (config_.endpoint.rfind("http://", 0) != 0)
      throw Error(ErrorCode::ConfigError, "endpoint must start with http://");
  }

  std::string complete(const std::string& prompt, const DecodingConfig& decoding) override {
    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = decoding.temperature;
    body["max_tokens"] = decoding.max_tokens;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "user"}, {"content", prompt}}});

    httplib::Client client(config_.endpoint);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      const char* key = std::getenv(config_.credential_env.c_str());
      if (!key)
        throw Error(ErrorCode::ConfigError,
                    "credential env var not set: " + config_.credential_env);
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res)
      throw Error(ErrorCode::ProviderError, "no response from " + config_.endpoint);
    if (res->status != 200)
      throw Error(ErrorCode::ProviderError,
                  "provider returned HTTP " + std::to_string(res->status));
    try {
      nlohmann::json parsed = nlohmann::json::parse(res->body);
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ProviderError, std::string("bad provider response: ") + e.what());
    }
  }

  std::string id() const override { return "network:" + config_.model; }

 private:
  NetworkProviderConfig config_;
};

}  // namespace easytool

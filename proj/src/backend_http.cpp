#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "nlohmann/json.hpp"
#include "provclass/backend.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

using json = nlohmann::json;

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 80;
  std::string path = "/";
};

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("endpoint must be an http(s) URL: " + url);
  }
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https") {
    throw ValidationError("unsupported endpoint scheme: " + out.scheme);
  }
  out.port = out.scheme == "https" ? 443 : 80;
  std::string rest = url.substr(scheme_end + 3);
  const std::size_t slash = rest.find('/');
  if (slash != std::string::npos) {
    out.path = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  const std::size_t colon = rest.find(':');
  if (colon != std::string::npos) {
    out.port = std::atoi(rest.substr(colon + 1).c_str());
    rest = rest.substr(0, colon);
  }
  if (rest.empty()) throw ValidationError("endpoint URL has no host: " + url);
  out.host = rest;
  return out;
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::chrono::milliseconds retry_delay(const httplib::Result& result, int attempt,
                                      const RetryPolicy& policy) {
  if (result && result->has_header("Retry-After")) {
    const std::string value = result->get_header_value("Retry-After");
    char* end = nullptr;
    const double seconds = std::strtod(value.c_str(), &end);
    if (end != value.c_str() && seconds >= 0) {
      return std::chrono::milliseconds(static_cast<long>(seconds * 1000.0));
    }
  }
  return policy.base_delay * (1L << attempt);
}

json messages_to_json(const std::vector<ChatMessage>& messages) {
  json out = json::array();
  for (const ChatMessage& m : messages) {
    out.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  return out;
}

std::string extract_assistant_content(const std::string& body) {
  json payload;
  try {
    payload = json::parse(body);
  } catch (const json::exception& ex) {
    throw BackendError(std::string("response is not JSON: ") + ex.what());
  }
  if (payload.contains("choices") && payload["choices"].is_array() &&
      !payload["choices"].empty()) {
    const json& choice = payload["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
  }
  if (payload.contains("content") && payload["content"].is_string()) {
    return payload["content"].get<std::string>();
  }
  throw BackendError("response carries no assistant message: " + body.substr(0, 200));
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
  const ParsedUrl url = parse_url(config_.endpoint);
  scheme_ = url.scheme;
  host_ = url.host;
  port_ = url.port;
  path_ = url.path;
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme_ == "https") {
    throw ValidationError("this build lacks TLS support; use an http endpoint or a proxy");
  }
#endif
}

std::string HttpBackend::identity() const {
  return "http:" + config_.model + "@" + config_.endpoint;
}

std::string HttpBackend::complete(const std::vector<ChatMessage>& messages) {
  json request = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", messages_to_json(messages)},
  };
  const std::string body = request.dump();

  httplib::Headers headers = {{"Content-Type", "application/json"}};
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::string last_error;
  for (int attempt = 0; attempt < config_.retry.max_attempts; ++attempt) {
    // One client per request; instances are not safe for concurrent reuse.
    httplib::Result result;
    const auto timeout_s =
        std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme_ == "https") {
      httplib::SSLClient client(host_, port_);
      client.set_read_timeout(timeout_s);
      client.set_connection_timeout(timeout_s);
      result = client.Post(path_, headers, body, "application/json");
    } else
#endif
    {
      httplib::Client client(host_, port_);
      client.set_read_timeout(timeout_s);
      client.set_connection_timeout(timeout_s);
      result = client.Post(path_, headers, body, "application/json");
    }

    if (result && result->status >= 200 && result->status < 300) {
      return extract_assistant_content(result->body);
    }
    if (result && !retryable_status(result->status)) {
      throw BackendError("chat endpoint returned HTTP " + std::to_string(result->status) + ": " +
                         result->body.substr(0, 200));
    }
    last_error = result ? "HTTP " + std::to_string(result->status)
                        : "transport error: " + httplib::to_string(result.error());
    if (attempt + 1 < config_.retry.max_attempts) {
      std::this_thread::sleep_for(retry_delay(result, attempt, config_.retry));
    }
  }
  throw BackendError("chat endpoint failed after " +
                     std::to_string(config_.retry.max_attempts) + " attempts (" + last_error +
                     ")");
}

}  // namespace provclass

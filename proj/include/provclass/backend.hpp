#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "provclass/keywords.hpp"
#include "provclass/prompt.hpp"
#include "provclass/segmenter.hpp"
#include "provclass/taxonomy.hpp"

namespace provclass {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{250};  // doubled on every retry
};

struct BackendConfig {
  std::string endpoint;  // chat-completion URL, e.g. http://host:8080/v1/chat/completions
  std::string model;
  double temperature = 0.2;
  int max_parallel_requests = 4;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{30000};
  std::string api_key_env = "PROVCLASS_API_KEY";  // bearer token read at request time

  void validate() const;
};

/// A chat-completion backend: messages in, assistant content out. Must
/// accept concurrent independent requests up to max_parallel().
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
  virtual std::string identity() const = 0;
  virtual int max_parallel() const { return 1; }
};

/// Deterministic offline backend: labels each sentence of the final user
/// message by a word-boundary phrase-rule table and answers in the canonical
/// grammar. Pure function of (message text, rule table).
class MockBackend final : public ChatBackend {
 public:
  MockBackend(std::vector<std::pair<ConceptId, std::string>> rules, std::string name);

  /// Same TSV format as keyword tables but any concept is allowed.
  static MockBackend from_rules_file(const std::string& path);

  std::string complete(const std::vector<ChatMessage>& messages) override;
  std::string identity() const override { return name_; }
  int max_parallel() const override { return 8; }

 private:
  PhraseMatcher matcher_;
  std::string name_;
  SegmenterConfig splitter_;
};

/// Generic chat-completion HTTP client: POSTs {model, temperature, messages}
/// and returns choices[0].message.content. Retries with exponential backoff,
/// honouring Retry-After on rate-limit responses.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(BackendConfig config);

  std::string complete(const std::vector<ChatMessage>& messages) override;
  std::string identity() const override;
  int max_parallel() const override { return config_.max_parallel_requests; }

  const BackendConfig& config() const { return config_; }

 private:
  BackendConfig config_;
  std::string scheme_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

struct ClassifyOutcome {
  /// One entry per input provision, in input order; label sets are raw
  /// backend labels (no closure).
  std::vector<std::pair<std::string, LabelSet>> labels;
  std::string raw_response;  // retained for audit
  std::vector<std::string> warnings;
};

/// Classifies one paragraph: builds the prompt for the template's mode,
/// queries the backend, parses the canonical grammar and aligns returned
/// sentences to provisions (exact match, then whitespace-normalized match,
/// then order-based fallback). Unknown label names are dropped with a
/// warning. Throws BackendError/ParseError on failure.
ClassifyOutcome classify_paragraph(ChatBackend& backend, const PromptTemplate& tpl,
                                   const std::string& paragraph,
                                   const std::vector<Provision>& provisions);

}  // namespace provclass

#pragma once

#include <chrono>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "signspot/lm.hpp"

namespace signspot {

/// Wire format tags for the continuation-logprob endpoint.
///
/// Request (POST, JSON):
///   {"format": "signspot.logprob-request/1", "model": <str>,
///    "prompt": <str>, "continuation": <str>}
/// Response (200, JSON):
///   {"tokens": [<str>...], "token_logprobs": [<number>...]}
/// The candidate's score is the sum of `token_logprobs`.
inline constexpr std::string_view kLogprobRequestFormat = "signspot.logprob-request/1";

struct ParsedEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // always begins with '/'
};

inline ParsedEndpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ValidationError("endpoint URL lacks a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

/// Scores candidates by asking a completion-style endpoint for the token
/// log-probabilities of each candidate as the continuation of the prompt.
/// One request per candidate; requests for one query run concurrently and are
/// aggregated in candidate order.
class RemoteModel final : public TransitionModel {
 public:
  explicit RemoteModel(LmBackendConfig cfg)
      : cfg_(validated(std::move(cfg))), endpoint_(parse_endpoint(cfg_.endpoint_url)) {
    if (const char* key = std::getenv(std::string(kApiKeyEnv).c_str())) api_key_ = key;
  }

  std::vector<double> probabilities(const TransitionQuery& query) const override {
    const std::string prompt = build_prompt(cfg_.prompt, query);
    std::vector<std::future<double>> pending;
    pending.reserve(query.candidates.size());
    for (const auto& cand : query.candidates) {
      pending.push_back(std::async(std::launch::async, [this, &prompt, &cand] {
        return continuation_logprob(prompt, " " + render_candidate(cfg_.prompt, cand));
      }));
    }
    std::vector<double> totals;
    totals.reserve(pending.size());
    std::exception_ptr first_error;
    for (auto& f : pending) {
      try {
        totals.push_back(f.get());
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
    return softmax(totals);
  }

  bool deterministic() const override { return false; }
  std::string name() const override { return "remote"; }

  /// Sum of token log-probabilities of `continuation` given `prompt`.
  double continuation_logprob(const std::string& prompt, const std::string& continuation) const {
    const nlohmann::json body = {{"format", kLogprobRequestFormat},
                                 {"model", cfg_.model_name},
                                 {"prompt", prompt},
                                 {"continuation", continuation}};
    const std::string payload = body.dump();

    httplib::Client client(endpoint_.base);
    const auto sec = cfg_.timeout_ms / 1000;
    const auto usec = (cfg_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string last_error;
    const int max_attempts = 1 + cfg_.max_retries;
    int attempt = 0;
    while (attempt < max_attempts) {
      ++attempt;
      auto res = client.Post(endpoint_.path, headers, payload, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status == 429 || res->status >= 500) continue;
        break;
      }
      try {
        const auto doc = nlohmann::json::parse(res->body);
        const auto& lps = doc.at("token_logprobs");
        if (!lps.is_array() || lps.empty()) throw std::runtime_error("empty token_logprobs");
        double total = 0.0;
        for (const auto& v : lps) total += v.get<double>();
        if (!std::isfinite(total)) throw std::runtime_error("non-finite log-probability");
        return total;
      } catch (const std::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
        break;
      }
    }
    throw TransportError(cfg_.endpoint_url, attempt, last_error);
  }

 private:
  static LmBackendConfig validated(LmBackendConfig cfg) {
    cfg.validate();
    return cfg;
  }

  LmBackendConfig cfg_;
  ParsedEndpoint endpoint_;
  std::string api_key_;
};

}  // namespace signspot

// SPDX-License-Identifier: Apache-2.0
#pragma once

// HTTP-backed providers speaking OpenRouter/OpenAI-style JSON APIs. Only the
// CLI includes this header; tests run against mocks.

#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "palibench/chat.hpp"
#include "palibench/embedding.hpp"
#include "palibench/errors.hpp"
#include "palibench/metrics.hpp"

namespace palibench {

namespace detail {

// Splits "https://host[:port]/base/path" into client origin and path prefix.
struct Endpoint {
    std::string origin;
    std::string path_prefix;

    static Endpoint parse(const std::string& url) {
        std::size_t scheme = url.find("://");
        if (scheme == std::string::npos)
            throw ValidationError("endpoint URL needs a scheme: " + url);
        std::size_t path = url.find('/', scheme + 3);
        Endpoint e;
        if (path == std::string::npos) {
            e.origin = url;
        } else {
            e.origin = url.substr(0, path);
            e.path_prefix = url.substr(path);
            while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
        }
        return e;
    }
};

inline std::string post_json(const std::string& base_url, const std::string& path,
                             const std::string& api_key, const nlohmann::json& body,
                             int timeout_seconds) {
    auto endpoint = Endpoint::parse(base_url);
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto result = client.Post(endpoint.path_prefix + path, headers, body.dump(),
                              "application/json");
    if (!result)
        throw ClientError("request to " + base_url + path + " failed: " +
                          httplib::to_string(result.error()));
    if (result->status != 200)
        throw ClientError("request to " + base_url + path + " returned HTTP " +
                          std::to_string(result->status) + ": " + result->body.substr(0, 500));
    return result->body;
}

} // namespace detail

class HttpChatClient : public ChatClient {
  public:
    HttpChatClient(std::string base_url, std::string api_key_env, int timeout_seconds = 300)
        : base_url_(std::move(base_url)),
          api_key_(api_key_from_env(api_key_env)),
          timeout_(timeout_seconds) {}

    ChatResponse complete(const ChatRequest& request) override {
        nlohmann::json body;
        body["model"] = request.model;
        body["temperature"] = request.temperature;
        body["messages"] = nlohmann::json::array(
            {{{"role", "system"}, {"content", request.system_prompt}},
             {{"role", "user"}, {"content", request.user_payload}}});
        std::string raw = detail::post_json(base_url_, "/chat/completions", api_key_, body,
                                            timeout_);
        try {
            auto doc = nlohmann::json::parse(raw);
            return {doc.at("choices").at(0).at("message").at("content").get<std::string>()};
        } catch (const nlohmann::json::exception& e) {
            throw ClientError(std::string("unexpected chat completion response: ") + e.what());
        }
    }

  private:
    std::string base_url_;
    std::string api_key_;
    int timeout_;
};

class HttpEmbedder : public Embedder {
  public:
    HttpEmbedder(std::string base_url, std::string model, std::string api_key_env,
                 std::unique_ptr<EmbeddingCache> cache = nullptr, std::size_t batch_size = 64,
                 int timeout_seconds = 300)
        : base_url_(std::move(base_url)),
          model_(std::move(model)),
          api_key_(api_key_from_env(api_key_env)),
          cache_(std::move(cache)),
          batch_size_(batch_size == 0 ? 1 : batch_size),
          timeout_(timeout_seconds) {}

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out(texts.size());
        std::vector<std::size_t> misses;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (cache_) {
                if (const EmbeddingVector* hit = cache_->find(sha256_hex(texts[i]))) {
                    out[i] = *hit;
                    continue;
                }
            }
            misses.push_back(i);
        }
        for (std::size_t start = 0; start < misses.size(); start += batch_size_) {
            std::size_t end = std::min(misses.size(), start + batch_size_);
            nlohmann::json body;
            body["model"] = model_;
            nlohmann::json input = nlohmann::json::array();
            for (std::size_t k = start; k < end; ++k) input.push_back(texts[misses[k]]);
            body["input"] = input;
            std::string raw = detail::post_json(base_url_, "/embeddings", api_key_, body, timeout_);
            try {
                auto doc = nlohmann::json::parse(raw);
                const auto& data = doc.at("data");
                if (data.size() != end - start)
                    throw ClientError("embedding endpoint returned " +
                                      std::to_string(data.size()) + " vectors for " +
                                      std::to_string(end - start) + " inputs");
                for (std::size_t k = start; k < end; ++k) {
                    EmbeddingVector vec;
                    for (const auto& v : data.at(k - start).at("embedding"))
                        vec.values.push_back(v.get<double>());
                    vec.validate();
                    if (cache_) cache_->put(sha256_hex(texts[misses[k]]), vec);
                    out[misses[k]] = std::move(vec);
                }
            } catch (const nlohmann::json::exception& e) {
                throw ClientError(std::string("unexpected embedding response: ") + e.what());
            }
        }
        return out;
    }

  private:
    std::string base_url_;
    std::string model_;
    std::string api_key_;
    std::unique_ptr<EmbeddingCache> cache_;
    std::size_t batch_size_;
    int timeout_;
};

// POST /score with [{source, hypothesis, reference}, ...] -> {"scores": [...]}.
class HttpExternalScorer : public ExternalScorer {
  public:
    HttpExternalScorer(std::string base_url, std::string scorer_id, std::string api_key_env,
                       int timeout_seconds = 300)
        : base_url_(std::move(base_url)),
          id_(std::move(scorer_id)),
          api_key_(api_key_env.empty() ? "" : api_key_from_env(api_key_env)),
          timeout_(timeout_seconds) {}

    std::string id() const override { return id_; }

    std::vector<double> score_batch(const std::vector<Triple>& triples) override {
        nlohmann::json body = nlohmann::json::array();
        for (const auto& t : triples)
            body.push_back({{"source", t.source},
                            {"hypothesis", t.hypothesis},
                            {"reference", t.reference}});
        std::string raw = detail::post_json(base_url_, "/score", api_key_, body, timeout_);
        try {
            auto doc = nlohmann::json::parse(raw);
            std::vector<double> scores;
            for (const auto& v : doc.at("scores")) scores.push_back(v.get<double>());
            return scores;
        } catch (const nlohmann::json::exception& e) {
            throw ClientError(std::string("unexpected scorer response: ") + e.what());
        }
    }

  private:
    std::string base_url_;
    std::string id_;
    std::string api_key_;
    int timeout_;
};

} // namespace palibench

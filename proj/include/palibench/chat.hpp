// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <json.hpp>

#include "palibench/digest.hpp"
#include "palibench/errors.hpp"

namespace palibench {

struct ChatRequest {
    std::string model;
    std::string system_prompt;
    std::string user_payload;
    double temperature = 0.0;

    // Content digest used for mock lookup and response caches. Temperature
    // is logged, not keyed: canned fixtures stay valid across tuning.
    std::string digest() const {
        std::string blob = model;
        blob.push_back('\x1e');
        blob += system_prompt;
        blob.push_back('\x1e');
        blob += user_payload;
        return sha256_hex(blob);
    }
};

struct ChatResponse {
    std::string content;
};

class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_ms = 0;
};

// Test/offline client: JSON object file mapping request digest -> response
// content. Requests with no canned entry fail the same way a dead endpoint
// would, so retry handling is exercised for real.
class FileMockChatClient : public ChatClient {
  public:
    explicit FileMockChatClient(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("io-error: cannot open mock responses: " + path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("mock response file " + path + ": " + e.what());
        }
        if (!doc.is_object()) throw ValidationError("mock response file must be a JSON object");
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (!it.value().is_string())
                throw ValidationError("mock response for " + it.key() + " must be a string");
            responses_[it.key()] = it.value().get<std::string>();
        }
    }

    ChatResponse complete(const ChatRequest& request) override {
        std::lock_guard<std::mutex> lock(mutex_);
        ++calls_;
        auto it = responses_.find(request.digest());
        if (it == responses_.end())
            throw ClientError("no canned response for request digest " + request.digest());
        return {it->second};
    }

    int calls() const { return calls_; }

    static void write(const std::string& path, const std::map<std::string, std::string>& entries) {
        nlohmann::json doc = nlohmann::json::object();
        for (const auto& [k, v] : entries) doc[k] = v;
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("io-error: cannot write mock responses: " + path);
        out << doc.dump(2) << '\n';
    }

  private:
    std::map<std::string, std::string> responses_;
    std::mutex mutex_;
    int calls_ = 0;
};

// One repair pass before strict parsing: unwrap a ``` fence (with optional
// language tag). Anything beyond that is a malformed response.
inline std::string strip_code_fence(const std::string& raw) {
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string text = trim(raw);
    if (text.rfind("```", 0) != 0) return text;
    std::size_t first_nl = text.find('\n');
    if (first_nl == std::string::npos) return text;
    std::size_t closing = text.rfind("```");
    if (closing <= first_nl) return text;
    return trim(text.substr(first_nl + 1, closing - first_nl - 1));
}

inline std::string api_key_from_env(const std::string& env_var) {
    const char* key = std::getenv(env_var.c_str());
    if (key == nullptr || *key == '\0')
        throw ValidationError("API key environment variable not set: " + env_var);
    return key;
}

} // namespace palibench

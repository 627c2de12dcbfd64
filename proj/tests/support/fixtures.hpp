// Shared test fixtures: small corpora, scripted chat clients, vector builders.
#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "palibench/chat.hpp"
#include "palibench/corpus.hpp"

namespace fixtures {

// Client driven by an explicit schedule of behaviors, one per call.
class ScriptedChatClient : public palibench::ChatClient {
  public:
    using Handler = std::function<std::string(const palibench::ChatRequest&)>;

    void push_failure(const std::string& message) {
        script_.push_back([message](const palibench::ChatRequest&) -> std::string {
            throw palibench::ClientError(message);
        });
    }

    void push_response(std::string content) {
        script_.push_back(
            [content = std::move(content)](const palibench::ChatRequest&) { return content; });
    }

    void push_handler(Handler h) { script_.push_back(std::move(h)); }

    // Used once the script is exhausted; defaults to echoing an error.
    void set_default(Handler h) { default_ = std::move(h); }

    palibench::ChatResponse complete(const palibench::ChatRequest& request) override {
        std::lock_guard<std::mutex> lock(mutex_);
        ++calls_;
        requests_.push_back(request);
        if (next_ < script_.size()) return {script_[next_++](request)};
        if (default_) return {default_(request)};
        throw palibench::ClientError("scripted client: no behavior left");
    }

    int calls() const { return calls_; }
    const std::vector<palibench::ChatRequest>& requests() const { return requests_; }

  private:
    std::vector<Handler> script_;
    Handler default_;
    std::size_t next_ = 0;
    std::vector<palibench::ChatRequest> requests_;
    int calls_ = 0;
    std::mutex mutex_;
};

// Parses the SEGMENTS part of an alignment payload and answers with the
// anchor translation for every id (or a scripted override per id).
inline std::string echo_alignment_response(
    const palibench::ChatRequest& request,
    const std::map<std::string, std::optional<std::string>>& overrides = {}) {
    const std::string& payload = request.user_payload;
    std::size_t at = payload.find("SEGMENTS:\n");
    if (at == std::string::npos)
        throw std::runtime_error("alignment payload missing SEGMENTS block");
    auto segments = nlohmann::ordered_json::parse(payload.substr(at + 10));
    nlohmann::ordered_json reply = nlohmann::ordered_json::object();
    for (auto it = segments.begin(); it != segments.end(); ++it) {
        auto o = overrides.find(it.key());
        if (o != overrides.end()) {
            if (o->second.has_value())
                reply[it.key()] = *o->second;
            else
                reply[it.key()] = nullptr;
        } else {
            reply[it.key()] = it.value()["sujato"].get<std::string>();
        }
    }
    return reply.dump();
}

inline palibench::Segment make_segment(const std::string& id, const std::string& source,
                                       const std::string& anchor_name,
                                       const std::string& anchor_text) {
    palibench::Segment s;
    s.id = palibench::parse_segment_id(id);
    s.source_text = source;
    s.translations[anchor_name] = anchor_text;
    return s;
}

// Corpus with a single anchor translator and the given (id, source, anchor)
// rows; target documents are derived by concatenating anchor texts per doc.
struct AlignFixture {
    palibench::AlignedCorpus corpus;
    std::map<std::string, std::string> target_docs;
};

inline AlignFixture small_align_fixture() {
    AlignFixture fx;
    fx.corpus.translators = {{"alder", palibench::TranslatorRole::SegmentationAnchor}};
    std::vector<palibench::Segment> segs;
    auto add = [&](const std::string& id, const std::string& text) {
        segs.push_back(make_segment(id, "src " + id, "alder", text));
    };
    add("mn1:1.1", "The mendicant went to the village.");
    add("mn1:1.2", "He begged for alms there.");
    add("mn1:2.1", "Then he returned to the grove.");
    add("mn2:1.1", "The teacher addressed the assembly.");
    add("mn2:1.2", "Listen closely, friends.");
    fx.corpus.passages = palibench::group_segments_into_passages(std::move(segs));
    for (const auto& p : fx.corpus.passages)
        for (const auto& s : p.segments) {
            auto& doc = fx.target_docs[s.id.doc];
            if (!doc.empty()) doc += ' ';
            doc += s.entry("alder")->value();
        }
    return fx;
}

} // namespace fixtures

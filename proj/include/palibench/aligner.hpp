// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "palibench/chat.hpp"
#include "palibench/corpus.hpp"
#include "palibench/errors.hpp"
#include "palibench/parallel.hpp"

namespace palibench {

struct AlignerConfig {
    std::string model = "alignment-model";
    int batch_size = 20;          // within the 15-30 band; overflow splits at doc boundaries
    int max_batch_size = 30;
    std::size_t request_char_budget = 400000;
    int concurrency = 1;
    double temperature = 0.0;
    std::string journal_path;     // per-segment results for crash-safe resume; empty disables
};

struct AlignmentBatch {
    struct Item {
        SegmentId id;
        std::string source_text;
        std::string anchor_translation;
    };
    std::string doc;
    std::vector<Item> items;
    std::string target_document;
};

inline void validate_batch(const AlignmentBatch& batch, int max_batch_size) {
    if (batch.items.empty()) throw ValidationError("alignment batch is empty");
    if (batch.items.size() > static_cast<std::size_t>(max_batch_size))
        throw ValidationError("alignment batch exceeds max size " +
                              std::to_string(max_batch_size) + " (" +
                              std::to_string(batch.items.size()) + " items)");
    for (const auto& item : batch.items)
        if (item.id.doc != batch.doc)
            throw ValidationError("batch for doc " + batch.doc + " contains segment " +
                                  item.id.raw());
}

// The user payload carries the target document exactly once, then the
// per-segment source and anchor texts keyed by segment id.
inline ChatRequest build_alignment_request(const AlignmentBatch& batch,
                                           std::string_view system_prompt,
                                           const AlignerConfig& config) {
    validate_batch(batch, config.max_batch_size);
    nlohmann::ordered_json segments = nlohmann::ordered_json::object();
    for (const auto& item : batch.items) {
        nlohmann::ordered_json entry;
        entry["pali"] = item.source_text;
        entry["sujato"] = item.anchor_translation;
        segments[item.id.raw()] = entry;
    }
    ChatRequest request;
    request.model = config.model;
    request.system_prompt = std::string(system_prompt);
    request.temperature = config.temperature;
    request.user_payload = "TARGET TRANSLATION (document " + batch.doc + "):\n" +
                           batch.target_document + "\n\nSEGMENTS:\n" + segments.dump(2);
    if (request.user_payload.size() > config.request_char_budget)
        throw ValidationError("oversize-request: payload " +
                              std::to_string(request.user_payload.size()) + " chars exceeds budget " +
                              std::to_string(config.request_char_budget) + " for doc " + batch.doc);
    return request;
}

struct AlignmentResult {
    std::vector<std::pair<std::string, std::optional<std::string>>> entries; // id -> text|null
    std::string raw_response;
    int attempt_count = 0;
};

// Strict structured-output validation: the response must be a JSON object
// with exactly the expected keys, in the declared order, each mapping to a
// string or null. The only repair attempted first is code-fence stripping.
inline AlignmentResult parse_alignment_response(const std::string& raw,
                                                const std::vector<std::string>& expected_ids) {
    AlignmentResult result;
    result.raw_response = raw;
    std::string body = strip_code_fence(raw);
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed-response: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("malformed-response: not a JSON object");

    std::vector<std::string> got_keys;
    for (auto it = doc.begin(); it != doc.end(); ++it) got_keys.push_back(it.key());

    std::set<std::string> expected_set(expected_ids.begin(), expected_ids.end());
    std::set<std::string> got_set(got_keys.begin(), got_keys.end());
    if (got_keys.size() != got_set.size())
        throw ValidationError("malformed-response: duplicate keys");
    if (expected_set != got_set) {
        std::string missing, extra;
        for (const auto& k : expected_ids)
            if (!got_set.count(k)) missing += (missing.empty() ? "" : ", ") + k;
        for (const auto& k : got_keys)
            if (!expected_set.count(k)) extra += (extra.empty() ? "" : ", ") + k;
        throw ValidationError("key-mismatch: missing [" + missing + "] extra [" + extra + "]");
    }
    if (got_keys != expected_ids) throw ValidationError("order-violation: keys reordered");

    for (const auto& id : expected_ids) {
        const auto& value = doc[id];
        if (value.is_null())
            result.entries.emplace_back(id, std::nullopt);
        else if (value.is_string())
            result.entries.emplace_back(id, value.get<std::string>());
        else
            throw ValidationError("malformed-response: value for " + id +
                                  " must be string or null");
    }
    return result;
}

struct AlignmentFailure {
    std::string doc;
    std::vector<std::string> segment_ids;
    std::string reason;
};

struct AlignmentLog {
    std::vector<AlignmentFailure> failures;
    std::vector<std::string> notes;
    int requests_sent = 0;
};

namespace detail {

struct JournalEntry {
    std::string translator;
    std::string segment_id;
    std::optional<std::string> text;
    int attempts = 0;
};

inline std::vector<JournalEntry> read_journal(const std::string& path) {
    std::vector<JournalEntry> entries;
    std::ifstream in(path);
    if (!in) return entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            continue; // torn tail line from a crashed run
        }
        JournalEntry e;
        e.translator = rec.value("translator", "");
        e.segment_id = rec.value("id", "");
        if (rec.contains("text") && !rec["text"].is_null())
            e.text = rec["text"].get<std::string>();
        e.attempts = rec.value("attempts", 0);
        if (!e.translator.empty() && !e.segment_id.empty()) entries.push_back(std::move(e));
    }
    return entries;
}

inline void append_journal(std::ofstream& out, const JournalEntry& e) {
    nlohmann::ordered_json rec;
    rec["translator"] = e.translator;
    rec["id"] = e.segment_id;
    if (e.text.has_value())
        rec["text"] = *e.text;
    else
        rec["text"] = nullptr;
    rec["attempts"] = e.attempts;
    out << rec.dump() << '\n';
    out.flush();
}

} // namespace detail

// Aligns one non-anchor translator: builds per-doc batches over segments
// that have no entry yet, drives the client under the retry policy, and
// commits results in deterministic batch order. Parse failures that survive
// all attempts record null for the whole batch and the run continues;
// transport failures surface as ClientError with doc/batch context.
inline AlignedCorpus align_translator(AlignedCorpus corpus, const TranslatorId& translator,
                                      const std::map<std::string, std::string>& target_documents,
                                      ChatClient& client, const RetryPolicy& policy,
                                      const AlignerConfig& config, std::string_view system_prompt,
                                      AlignmentLog* log = nullptr) {
    if (translator.role != TranslatorRole::Aligned)
        throw ValidationError("align_translator requires an aligned (non-anchor) translator");
    const std::string anchor_name = corpus.anchor().name;
    if (translator.name == anchor_name)
        throw ValidationError("cannot align the anchor translator " + anchor_name);
    if (!corpus.has_translator(translator.name)) corpus.translators.push_back(translator);

    AlignmentLog local_log;
    if (log == nullptr) log = &local_log;

    std::map<std::string, Segment*> by_id;
    for (auto& passage : corpus.passages)
        for (auto& seg : passage.segments) by_id[seg.id.raw()] = &seg;

    if (!config.journal_path.empty()) {
        for (const auto& entry : detail::read_journal(config.journal_path)) {
            if (entry.translator != translator.name) continue;
            auto it = by_id.find(entry.segment_id);
            if (it != by_id.end() && !it->second->has_entry(translator.name))
                it->second->translations[translator.name] = entry.text;
        }
    }

    // remaining work per doc, in corpus order
    std::map<std::string, std::vector<Segment*>> pending;
    for (auto& passage : corpus.passages)
        for (auto& seg : passage.segments)
            if (!seg.has_entry(translator.name)) pending[seg.id.doc].push_back(&seg);

    std::vector<AlignmentBatch> batches;
    std::vector<std::vector<Segment*>> batch_segments;
    for (auto& [doc, segments] : pending) {
        std::sort(segments.begin(), segments.end(),
                  [](const Segment* a, const Segment* b) { return a->id < b->id; });
        auto target = target_documents.find(doc);
        if (target == target_documents.end())
            throw ValidationError("no target document for doc " + doc + " (translator " +
                                  translator.name + ")");
        for (std::size_t start = 0; start < segments.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            AlignmentBatch batch;
            batch.doc = doc;
            batch.target_document = target->second;
            std::vector<Segment*> members;
            for (std::size_t i = start;
                 i < segments.size() && i < start + static_cast<std::size_t>(config.batch_size);
                 ++i) {
                Segment* seg = segments[i];
                batch.items.push_back(
                    {seg->id, seg->source_text, seg->entry(anchor_name)->value()});
                members.push_back(seg);
            }
            batches.push_back(std::move(batch));
            batch_segments.push_back(std::move(members));
        }
    }

    std::ofstream journal;
    if (!config.journal_path.empty())
        journal.open(config.journal_path, std::ios::app);

    struct BatchOutcome {
        std::optional<AlignmentResult> result;
        std::string failure;
        int attempts = 0;
        int requests = 0;
    };

    auto run_batch = [&](std::size_t index) -> BatchOutcome {
        const AlignmentBatch& batch = batches[index];
        std::vector<std::string> ids;
        for (const auto& item : batch.items) ids.push_back(item.id.raw());
        ChatRequest request = build_alignment_request(batch, system_prompt, config);
        BatchOutcome outcome;
        std::string last_error;
        for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
            outcome.attempts = attempt;
            try {
                ++outcome.requests;
                ChatResponse response = client.complete(request);
                AlignmentResult result = parse_alignment_response(response.content, ids);
                result.attempt_count = attempt;
                outcome.result = std::move(result);
                return outcome;
            } catch (const ClientError& e) {
                last_error = std::string("client-error: ") + e.what();
            } catch (const ValidationError& e) {
                last_error = e.what();
            }
            if (policy.backoff_ms > 0 && attempt < policy.max_attempts)
                std::this_thread::sleep_for(std::chrono::milliseconds(policy.backoff_ms * attempt));
        }
        outcome.failure = last_error;
        return outcome;
    };

    bounded_ordered_for(
        batches.size(), config.concurrency, run_batch,
        [&](std::size_t index, BatchOutcome outcome) {
            const AlignmentBatch& batch = batches[index];
            log->requests_sent += outcome.requests;
            if (!outcome.result.has_value()) {
                if (outcome.failure.rfind("client-error", 0) == 0)
                    throw ClientError("doc " + batch.doc + " batch " + std::to_string(index) +
                                      " (" + batch.items.front().id.raw() + "..): " +
                                      outcome.failure);
                // exhausted-retries on a parse failure: nulls, log, continue
                AlignmentFailure failure;
                failure.doc = batch.doc;
                failure.reason = outcome.failure;
                for (Segment* seg : batch_segments[index]) {
                    failure.segment_ids.push_back(seg->id.raw());
                    seg->translations[translator.name] = std::nullopt;
                    if (journal.is_open())
                        detail::append_journal(journal, {translator.name, seg->id.raw(),
                                                         std::nullopt, outcome.attempts});
                }
                log->failures.push_back(std::move(failure));
                return;
            }
            const AlignmentResult& result = *outcome.result;
            for (std::size_t i = 0; i < result.entries.size(); ++i) {
                Segment* seg = batch_segments[index][i];
                std::optional<std::string> value = result.entries[i].second;
                // empty extraction is a failure unless the anchor is empty too
                if (value.has_value() && value->empty() &&
                    !seg->entry(anchor_name)->value().empty()) {
                    value = std::nullopt;
                    log->notes.push_back("coerced empty extraction to null for " + seg->id.raw());
                }
                seg->translations[translator.name] = value;
                if (journal.is_open())
                    detail::append_journal(
                        journal, {translator.name, seg->id.raw(), value, result.attempt_count});
            }
        });

    return corpus;
}

} // namespace palibench

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "palibench/chat.hpp"
#include "palibench/chrf.hpp"
#include "palibench/corpus.hpp"
#include "palibench/errors.hpp"
#include "palibench/metrics.hpp"
#include "palibench/parallel.hpp"
#include "palibench/prompts.hpp"
#include "palibench/ranking.hpp"

namespace palibench {

struct TranslationBatch {
    std::vector<std::pair<std::string, std::string>> items; // passage id -> source text
    std::size_t token_count = 0;
    bool oversize = false;
};

// Greedy in-order packing under the token budget; a single passage larger
// than the budget travels alone, flagged oversize.
inline std::vector<TranslationBatch> build_translation_batches(
    const std::vector<Passage>& passages, std::size_t token_budget = 3000) {
    if (token_budget == 0) throw ValidationError("token budget must be positive");
    std::vector<TranslationBatch> batches;
    TranslationBatch current;
    for (const auto& passage : passages) {
        std::string source = passage_source_text(passage);
        std::size_t tokens = approx_token_count(source);
        if (tokens > token_budget) {
            if (!current.items.empty()) {
                batches.push_back(std::move(current));
                current = {};
            }
            TranslationBatch lone;
            lone.items.emplace_back(passage.id.raw, std::move(source));
            lone.token_count = tokens;
            lone.oversize = true;
            batches.push_back(std::move(lone));
            continue;
        }
        if (current.token_count + tokens > token_budget && !current.items.empty()) {
            batches.push_back(std::move(current));
            current = {};
        }
        current.items.emplace_back(passage.id.raw, std::move(source));
        current.token_count += tokens;
    }
    if (!current.items.empty()) batches.push_back(std::move(current));
    return batches;
}

struct SystemRun {
    std::string system;
    std::map<std::string, std::string> outputs; // passage id -> translation
    std::vector<std::string> missing;           // passages abandoned after retries
    std::map<std::string, std::string> metadata;

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("io-error: cannot write run file: " + path);
        nlohmann::ordered_json header;
        header["system"] = system;
        nlohmann::ordered_json meta;
        for (const auto& [k, v] : metadata) meta[k] = v;
        header["metadata"] = meta;
        out << header.dump() << '\n';
        for (const auto& [id, text] : outputs) {
            nlohmann::ordered_json rec;
            rec["passage"] = id;
            rec["text"] = text;
            out << rec.dump() << '\n';
        }
        for (const auto& id : missing) {
            nlohmann::ordered_json rec;
            rec["passage"] = id;
            rec["text"] = nullptr;
            out << rec.dump() << '\n';
        }
    }

    static SystemRun load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("io-error: cannot open run file: " + path);
        SystemRun run;
        std::string line;
        if (!std::getline(in, line)) throw ValidationError("run file missing header: " + path);
        auto header = nlohmann::json::parse(line);
        run.system = header.value("system", "");
        if (header.contains("metadata"))
            for (auto it = header["metadata"].begin(); it != header["metadata"].end(); ++it)
                run.metadata[it.key()] = it.value().get<std::string>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto rec = nlohmann::json::parse(line);
            std::string id = rec.at("passage").get<std::string>();
            if (rec.at("text").is_null())
                run.missing.push_back(id);
            else
                run.outputs[id] = rec.at("text").get<std::string>();
        }
        return run;
    }
};

struct RunnerConfig {
    std::string model;
    std::size_t token_budget = 3000;
    double temperature = 0.0;
    int concurrency = 1;
};

struct RunnerLog {
    int requests_sent = 0;
    std::vector<std::string> quote_repairs;
    std::vector<std::string> failures;
};

// Translates the benchmark with one system. Zero-shot: the request is the
// fixed system prompt plus a JSON object of passage id -> source text.
// Responses get the same strict same-keys validation as alignment; double
// quotes inside values are repaired to single quotes and logged. Passages
// already present in `resume` are not re-requested.
inline SystemRun run_system(const std::string& system_id, const std::vector<Passage>& passages,
                            ChatClient& client, const RetryPolicy& policy,
                            const RunnerConfig& config, const SystemRun* resume = nullptr,
                            RunnerLog* log = nullptr) {
    RunnerLog local_log;
    if (log == nullptr) log = &local_log;

    SystemRun run;
    run.system = system_id;
    run.metadata["model"] = config.model.empty() ? system_id : config.model;
    run.metadata["prompt_version"] = std::string(prompts::kPromptVersion);
    run.metadata["token_budget"] = std::to_string(config.token_budget);
    if (resume != nullptr && resume->system == system_id) run.outputs = resume->outputs;

    std::vector<Passage> pending;
    for (const auto& p : passages)
        if (!run.outputs.count(p.id.raw)) pending.push_back(p);
    std::vector<TranslationBatch> batches = build_translation_batches(pending, config.token_budget);

    struct Outcome {
        std::optional<std::vector<std::pair<std::string, std::string>>> outputs;
        std::string failure;
        int requests = 0;
    };

    auto run_batch = [&](std::size_t index) -> Outcome {
        const TranslationBatch& batch = batches[index];
        nlohmann::ordered_json payload = nlohmann::ordered_json::object();
        std::vector<std::string> ids;
        for (const auto& [id, source] : batch.items) {
            payload[id] = source;
            ids.push_back(id);
        }
        ChatRequest request;
        request.model = run.metadata["model"];
        request.system_prompt = std::string(prompts::kTranslationSystemPrompt);
        request.user_payload = payload.dump(2);
        request.temperature = config.temperature;

        Outcome outcome;
        std::string last_error;
        for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
            try {
                ++outcome.requests;
                ChatResponse response = client.complete(request);
                std::string body = strip_code_fence(response.content);
                nlohmann::ordered_json doc;
                try {
                    doc = nlohmann::ordered_json::parse(body);
                } catch (const nlohmann::json::exception& e) {
                    throw ValidationError(std::string("malformed-response: ") + e.what());
                }
                if (!doc.is_object()) throw ValidationError("malformed-response: not an object");
                std::vector<std::string> got;
                for (auto it = doc.begin(); it != doc.end(); ++it) got.push_back(it.key());
                if (std::set<std::string>(got.begin(), got.end()) !=
                    std::set<std::string>(ids.begin(), ids.end()))
                    throw ValidationError("key-mismatch in translation response");
                if (got != ids) throw ValidationError("order-violation in translation response");
                std::vector<std::pair<std::string, std::string>> outputs;
                for (const auto& id : ids) {
                    if (!doc[id].is_string())
                        throw ValidationError("malformed-response: value for " + id +
                                              " must be a string");
                    outputs.emplace_back(id, doc[id].get<std::string>());
                }
                outcome.outputs = std::move(outputs);
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

    bounded_ordered_for(batches.size(), config.concurrency, run_batch,
                        [&](std::size_t index, Outcome outcome) {
                            log->requests_sent += outcome.requests;
                            if (!outcome.outputs.has_value()) {
                                for (const auto& [id, source] : batches[index].items) {
                                    run.missing.push_back(id);
                                    log->failures.push_back(id + ": " + outcome.failure);
                                }
                                return;
                            }
                            for (auto& [id, text] : *outcome.outputs) {
                                // the protocol forbids double quotes inside values
                                if (text.find('"') != std::string::npos) {
                                    for (char& c : text)
                                        if (c == '"') c = '\'';
                                    log->quote_repairs.push_back(id);
                                }
                                run.outputs[id] = std::move(text);
                            }
                        });
    return run;
}

struct EvalConfig {
    OutlierThreshold outlier_threshold;
    NormalizationProfile profile;
    double min_coverage = 1.0; // fraction of benchmark passages the run must cover
};

struct SystemEvaluation {
    SystemRow row;
    std::vector<PassageScores> passages;
};

// Reference geometry is shared across systems; computing it once per
// benchmark passage keeps repeated evaluations off the embedding provider.
class GeometryCache {
  public:
    const ReferenceGeometry& get(const Passage& passage, const AlignedCorpus& corpus,
                                 Embedder& embedder) {
        auto it = cache_.find(passage.id.raw);
        if (it != cache_.end()) return it->second;
        std::map<std::string, EmbeddingVector> refs;
        for (const auto& t : corpus.translators)
            refs[t.name] = embedder.embed_one(passage_translation_text(passage, t.name));
        auto [pos, inserted] = cache_.emplace(passage.id.raw, reference_geometry(refs));
        return pos->second;
    }

  private:
    std::map<std::string, ReferenceGeometry> cache_;
};

inline SystemEvaluation evaluate_system(const SystemRun& run, const AlignedCorpus& benchmark,
                                        Embedder& embedder, GeometryCache& geometry,
                                        ExternalScorer* scorer, ScoreCache* score_cache,
                                        const EvalConfig& config) {
    config.outlier_threshold.validate();
    SystemEvaluation eval;
    eval.row.system = run.system;

    std::vector<const Passage*> covered;
    for (const auto& p : benchmark.passages)
        if (run.outputs.count(p.id.raw)) covered.push_back(&p);
    if (benchmark.passages.empty()) throw ValidationError("benchmark has no passages");
    double coverage =
        static_cast<double>(covered.size()) / static_cast<double>(benchmark.passages.size());
    if (coverage < config.min_coverage)
        throw ValidationError("insufficient-coverage: " + std::to_string(covered.size()) + "/" +
                              std::to_string(benchmark.passages.size()) + " passages for " +
                              run.system);
    eval.row.coverage = coverage;

    BleuStats bleu_total;
    ChrfStats chrf_pooled;
    double sim_best_sum = 0, chrf_sum = 0, length_sum = 0, external_sum = 0;
    std::size_t outliers = 0, external_count = 0;
    std::map<std::string, std::size_t> closest_counts;
    bool external_ok = scorer != nullptr;

    for (const Passage* passage : covered) {
        const std::string& hypothesis = run.outputs.at(passage->id.raw);
        PassageScores ps;
        ps.passage = passage->id.raw;

        std::map<std::string, std::string> ref_texts;
        std::vector<std::string> ref_list;
        for (const auto& t : benchmark.translators) {
            ref_texts[t.name] = passage_translation_text(*passage, t.name);
            ref_list.push_back(ref_texts[t.name]);
        }

        const ReferenceGeometry& geo = geometry.get(*passage, benchmark, embedder);
        EmbeddingVector mt = embedder.embed_one(hypothesis);
        EmbeddingScores es = passage_embedding_scores(mt, geo, config.outlier_threshold);
        ps.sim_best = es.sim_best;
        ps.sim_centroid = es.sim_centroid;
        ps.normalized_drift = es.normalized_drift;
        ps.outlier = es.outlier;
        ps.closest = es.closest;
        ps.degenerate_geometry = es.degenerate_geometry;

        ps.length_ratio = length_ratio(hypothesis, ref_list);
        ps.chrfpp = chrfpp_passage(hypothesis, ref_list);
        chrf_pooled += chrf_pair_stats(hypothesis, ref_list[chrfpp_best_reference(hypothesis, ref_list)]);

        std::vector<std::vector<std::string>> ref_tokens;
        for (const auto& r : ref_list) ref_tokens.push_back(bleu_tokenize(r, config.profile));
        ps.bleu = bleu_pair_stats(bleu_tokenize(hypothesis, config.profile), ref_tokens);
        bleu_total += ps.bleu;

        if (external_ok) {
            try {
                ps.external = external_quality_scores(passage_source_text(*passage), hypothesis,
                                                      ref_texts, *scorer, score_cache);
                external_sum += ps.external->avg;
                ++external_count;
            } catch (const ClientError&) {
                external_ok = false; // scorer-unavailable: dimension invalid for this system
                ps.external.reset();
            }
        }

        sim_best_sum += ps.sim_best;
        chrf_sum += ps.chrfpp;
        length_sum += ps.length_ratio;
        if (ps.outlier) ++outliers;
        ++closest_counts[ps.closest];
        eval.passages.push_back(std::move(ps));
    }

    const double n = static_cast<double>(covered.size());
    eval.row.sim_best = sim_best_sum / n;
    eval.row.chrfpp = chrf_sum / n;
    eval.row.chrfpp_pooled = chrf_score_from_stats(chrf_pooled);
    eval.row.bleu = bleu_score_from_stats(bleu_total);
    eval.row.length_ratio = length_sum / n;
    eval.row.outlier_pct = 100.0 * static_cast<double>(outliers) / n;
    eval.row.external_valid = external_ok && external_count == covered.size();
    if (eval.row.external_valid) {
        eval.row.external_avg = external_sum / n;
        double best_sum = 0;
        for (const auto& ps : eval.passages) best_sum += ps.external->best;
        eval.row.external_best = best_sum / n;
    }
    for (const auto& t : benchmark.translators) {
        double pct = 100.0 * static_cast<double>(closest_counts[t.name]) / n;
        eval.row.closest_pct[t.name] = pct;
    }
    return eval;
}

/// Percentage of passages whose closest reference is each translator.
inline std::map<std::string, double> closest_translator_distribution(
    const std::vector<PassageScores>& passages, const std::vector<std::string>& translators) {
    std::map<std::string, double> out;
    for (const auto& t : translators) out[t] = 0.0;
    if (passages.empty()) return out;
    for (const auto& ps : passages) out[ps.closest] += 1.0;
    for (auto& [name, v] : out) v = 100.0 * v / static_cast<double>(passages.size());
    return out;
}

} // namespace palibench

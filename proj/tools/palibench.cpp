// SPDX-License-Identifier: Apache-2.0
//
// Multi-reference translation benchmark toolkit. Every pipeline stage reads
// and writes plain files, so each subcommand is independently re-runnable:
//
//   palibench align     --config c.conf --translator <name>
//   palibench verify    --config c.conf
//   palibench curate    --config c.conf
//   palibench translate --config c.conf --system <id>
//   palibench evaluate  --config c.conf [--system <id>]
//   palibench report    --config c.conf
//
// Exit codes: 0 success, 1 validation failure, 2 upstream/client failure.

#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "palibench/aligner.hpp"
#include "palibench/bench.hpp"
#include "palibench/chat.hpp"
#include "palibench/config.hpp"
#include "palibench/corpus_io.hpp"
#include "palibench/curation.hpp"
#include "palibench/eval_io.hpp"
#include "palibench/http_clients.hpp"
#include "palibench/prompts.hpp"
#include "palibench/reports.hpp"
#include "palibench/verifier.hpp"

namespace fs = std::filesystem;
using namespace palibench;

namespace {

std::unique_ptr<ChatClient> make_chat_client(const Config& cfg) {
    std::string provider = cfg.get("chat.provider", "http");
    if (provider == "mock") return std::make_unique<FileMockChatClient>(cfg.require("chat.mock_file"));
    if (provider == "http")
        return std::make_unique<HttpChatClient>(
            cfg.get("chat.endpoint", "https://openrouter.ai/api/v1"),
            cfg.get("chat.api_key_env", "OPENROUTER_API_KEY"),
            static_cast<int>(cfg.get_int("chat.timeout_seconds", 300)));
    throw ValidationError("chat.provider must be 'http' or 'mock', got '" + provider + "'");
}

std::unique_ptr<Embedder> make_embedder(const Config& cfg) {
    std::string provider = cfg.get("embed.provider", "file");
    if (provider == "file")
        return std::make_unique<FileVectorStore>(cfg.require("embed.vectors_file"));
    if (provider == "http") {
        std::unique_ptr<EmbeddingCache> cache;
        if (cfg.has("embed.cache"))
            cache = std::make_unique<EmbeddingCache>(cfg.get("embed.cache"));
        return std::make_unique<HttpEmbedder>(
            cfg.get("embed.endpoint", "https://openrouter.ai/api/v1"), cfg.require("embed.model"),
            cfg.get("embed.api_key_env", "OPENROUTER_API_KEY"), std::move(cache),
            static_cast<std::size_t>(cfg.get_int("embed.batch_size", 64)),
            static_cast<int>(cfg.get_int("embed.timeout_seconds", 300)));
    }
    throw ValidationError("embed.provider must be 'file' or 'http', got '" + provider + "'");
}

std::unique_ptr<ExternalScorer> make_scorer(const Config& cfg) {
    std::string provider = cfg.get("scorer.provider", "none");
    if (provider == "none") return nullptr;
    if (provider == "http")
        return std::make_unique<HttpExternalScorer>(
            cfg.require("scorer.endpoint"), cfg.get("scorer.id", "external"),
            cfg.get("scorer.api_key_env", ""),
            static_cast<int>(cfg.get_int("scorer.timeout_seconds", 300)));
    if (provider == "constant")
        return std::make_unique<ConstantScorer>(cfg.get_double("scorer.value", 0.5));
    throw ValidationError("scorer.provider must be 'none', 'http', or 'constant'");
}

// <documents_dir>/<translator>/<doc>.txt
std::map<std::string, std::string> load_documents(const std::string& dir,
                                                  const std::string& translator) {
    fs::path base = fs::path(dir) / translator;
    if (!fs::is_directory(base))
        throw ValidationError("no document directory for translator " + translator + " under " +
                              dir);
    std::map<std::string, std::string> docs;
    for (const auto& entry : fs::directory_iterator(base)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        docs[entry.path().stem().string()] =
            std::string(std::istreambuf_iterator<char>(in), {});
    }
    if (docs.empty()) throw ValidationError("no .txt documents under " + base.string());
    return docs;
}

int cmd_align(const Config& cfg, const std::string& translator_name) {
    AlignedCorpus corpus = load_corpus(cfg.require("corpus.file"));
    auto targets = load_documents(cfg.require("corpus.documents_dir"), translator_name);
    auto client = make_chat_client(cfg);
    AlignmentLog log;
    AlignedCorpus aligned = align_translator(
        std::move(corpus), {translator_name, TranslatorRole::Aligned}, targets, *client,
        retry_policy_from_config(cfg), aligner_config_from_config(cfg),
        prompts::kAlignmentSystemPrompt, &log);
    std::string out_path = cfg.get("align.output", cfg.require("corpus.file"));
    save_corpus(aligned, out_path);
    std::cout << "aligned " << translator_name << ": " << log.requests_sent << " requests, "
              << log.failures.size() << " failed batches -> " << out_path << "\n";
    for (const auto& f : log.failures)
        std::cerr << "  failed batch in " << f.doc << " (" << f.segment_ids.size()
                  << " segments null): " << f.reason << "\n";
    return 0;
}

int cmd_verify(const Config& cfg) {
    AlignedCorpus corpus = load_corpus(cfg.require("corpus.file"));
    std::string docs_dir = cfg.require("corpus.documents_dir");
    std::map<std::string, std::map<std::string, std::string>> sources;
    for (const auto& t : corpus.translators)
        if (t.role == TranslatorRole::Aligned) sources[t.name] = load_documents(docs_dir, t.name);
    auto [records, stats] = verify_corpus(corpus, sources, verifier_config_from_config(cfg));
    std::string dir = cfg.get("verify.dir", ".");
    fs::create_directories(dir);
    write_verification_report(records, stats, dir);
    std::cout << "verified " << records.size() << " records -> " << dir
              << "/verification.jsonl\n";
    for (const auto& [name, t] : stats.per_translator)
        std::cout << "  " << name << ": " << t.non_null << " non-null, "
                  << detail::fmt("%.1f", t.percent(VerificationCategory::Verbatim) +
                                              t.percent(VerificationCategory::Normalized))
                  << "% verbatim+normalized\n";
    return 0;
}

std::vector<VerificationRecord> load_verification_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("io-error: cannot open verification records: " + path);
    std::vector<VerificationRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto rec = nlohmann::json::parse(line);
        VerificationRecord r;
        r.segment = parse_segment_id(rec.at("segment").get<std::string>());
        r.translator = rec.at("translator").get<std::string>();
        std::string cat = rec.at("category").get<std::string>();
        if (cat == "verbatim") r.category = VerificationCategory::Verbatim;
        else if (cat == "normalized") r.category = VerificationCategory::Normalized;
        else if (cat == "expanded") r.category = VerificationCategory::Expanded;
        else if (cat == "cross_reference") r.category = VerificationCategory::CrossReference;
        else if (cat == "suspicious") r.category = VerificationCategory::Suspicious;
        else if (cat == "not_applicable") r.category = VerificationCategory::NotApplicable;
        else throw ValidationError("unknown verification category: " + cat);
        records.push_back(std::move(r));
    }
    return records;
}

int cmd_curate(const Config& cfg) {
    AlignedCorpus corpus = load_corpus(cfg.require("corpus.file"));
    std::string verify_dir = cfg.get("verify.dir", ".");
    auto records = load_verification_records(verify_dir + "/verification.jsonl");
    FilterThresholds thresholds = thresholds_from_config(cfg);
    NormalizationProfile profile = profile_from_config(cfg);

    std::vector<Passage> final_passages;
    CurationReport report = curate(corpus, records, thresholds, profile, &final_passages);
    // parameter provenance only; paths would break report determinism
    for (const auto& [key, value] : cfg.values())
        if (key.rfind("normalize.", 0) == 0) report.provenance[key] = value;
    report.provenance["verify.head_tail_chars"] =
        std::to_string(verifier_config_from_config(cfg).head_tail_chars);
    report.provenance["bleu_tokenizer"] = std::string(kBleuTokenizerId);

    std::string dir = cfg.get("curate.dir", ".");
    fs::create_directories(dir);
    write_curation_report(report, dir);

    AlignedCorpus benchmark;
    benchmark.translators = corpus.translators;
    benchmark.provenance = corpus.provenance;
    benchmark.provenance["curated"] = "true";
    benchmark.passages = std::move(final_passages);
    save_corpus(benchmark, cfg.require("curate.output"));
    std::cout << "curated: " << report.starting_passages << " -> "
              << report.retained_after_filter.size() << " after filtering -> "
              << report.final_passages.size() << " final (" << cfg.get("curate.output") << ")\n";
    return 0;
}

int cmd_translate(const Config& cfg, const std::string& system_id) {
    AlignedCorpus benchmark = load_corpus(cfg.require("curate.output"));
    auto client = make_chat_client(cfg);
    RunnerConfig rc;
    rc.model = cfg.get("chat.model", system_id);
    rc.token_budget = static_cast<std::size_t>(cfg.get_int("translate.token_budget", 3000));
    rc.temperature = cfg.get_double("chat.temperature", 0.0);
    rc.concurrency = static_cast<int>(cfg.get_int("chat.concurrency", 1));

    std::string runs_dir = cfg.get("translate.runs_dir", "runs");
    fs::create_directories(runs_dir);
    fs::path run_path = fs::path(runs_dir) / (sanitize_for_filename(system_id) + ".run.jsonl");

    SystemRun previous;
    const SystemRun* resume = nullptr;
    if (fs::exists(run_path)) {
        previous = SystemRun::load(run_path.string());
        resume = &previous;
    }
    RunnerLog log;
    SystemRun run = run_system(system_id, benchmark.passages, *client,
                               retry_policy_from_config(cfg), rc, resume, &log);
    run.save(run_path.string());
    std::cout << "translated " << run.outputs.size() << "/" << benchmark.passages.size()
              << " passages with " << system_id << " (" << log.requests_sent << " requests, "
              << run.missing.size() << " missing) -> " << run_path.string() << "\n";
    return 0;
}

int cmd_evaluate(const Config& cfg, const std::string& only_system) {
    AlignedCorpus benchmark = load_corpus(cfg.require("curate.output"));
    auto embedder = make_embedder(cfg);
    CachingEmbedder cached(*embedder);
    auto scorer = make_scorer(cfg);
    std::unique_ptr<ScoreCache> score_cache;
    if (scorer != nullptr && cfg.has("scorer.cache"))
        score_cache = std::make_unique<ScoreCache>(cfg.get("scorer.cache"));

    std::string runs_dir = cfg.get("translate.runs_dir", "runs");
    std::string eval_dir = cfg.get("eval.dir", "eval");
    fs::create_directories(eval_dir);

    std::vector<fs::path> run_files;
    for (const auto& entry : fs::directory_iterator(runs_dir))
        if (entry.is_regular_file() && entry.path().string().ends_with(".run.jsonl"))
            run_files.push_back(entry.path());
    std::sort(run_files.begin(), run_files.end());
    if (run_files.empty()) throw ValidationError("no run files under " + runs_dir);

    GeometryCache geometry;
    EvalConfig ec = eval_config_from_config(cfg);
    int evaluated = 0;
    for (const auto& path : run_files) {
        SystemRun run = SystemRun::load(path.string());
        if (!only_system.empty() && run.system != only_system) continue;
        SystemEvaluation eval = evaluate_system(run, benchmark, cached, geometry, scorer.get(),
                                                score_cache.get(), ec);
        fs::path out = fs::path(eval_dir) / (sanitize_for_filename(run.system) + ".eval.json");
        save_evaluation(eval, out.string());
        std::cout << "evaluated " << run.system << ": sim_best "
                  << detail::fmt("%.3f", eval.row.sim_best) << ", BLEU "
                  << detail::fmt("%.1f", eval.row.bleu) << ", chrF++ "
                  << detail::fmt("%.1f", eval.row.chrfpp) << " -> " << out.string() << "\n";
        ++evaluated;
    }
    if (evaluated == 0) throw ValidationError("no runs matched for evaluation");
    return 0;
}

int cmd_report(const Config& cfg) {
    AlignedCorpus benchmark = load_corpus(cfg.require("curate.output"));
    auto embedder = make_embedder(cfg);
    CachingEmbedder cached(*embedder);

    std::string eval_dir = cfg.get("eval.dir", "eval");
    std::vector<fs::path> eval_files;
    if (fs::is_directory(eval_dir))
        for (const auto& entry : fs::directory_iterator(eval_dir))
            if (entry.is_regular_file() && entry.path().string().ends_with(".eval.json"))
                eval_files.push_back(entry.path());
    std::sort(eval_files.begin(), eval_files.end());

    ReportBundle bundle;
    for (const auto& t : benchmark.translators) bundle.translators.push_back(t.name);
    std::sort(bundle.translators.begin(), bundle.translators.end());
    bundle.reference_similarity = reference_similarity_stats(benchmark, cached);

    std::vector<SystemRow> rows;
    for (const auto& path : eval_files) {
        SystemEvaluation eval = load_evaluation(path.string());
        bundle.per_passage[eval.row.system] = std::move(eval.passages);
        rows.push_back(std::move(eval.row));
    }
    if (rows.size() >= 2)
        bundle.ranked_rows = rank_systems(std::move(rows));
    else
        bundle.ranked_rows = std::move(rows); // headers-only / single-system output

    std::string dir = cfg.get("report.dir", "report");
    fs::create_directories(dir);
    emit_reports(bundle, dir);
    std::cout << "report over " << bundle.ranked_rows.size() << " systems -> " << dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-reference translation benchmark toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value configuration file")->required();

    std::string translator;
    auto* align = app.add_subcommand("align", "extract one translator's text per segment");
    align->add_option("--translator", translator, "translator to align")->required();

    app.add_subcommand("verify", "ground extractions in their source documents");
    app.add_subcommand("curate", "filter and deduplicate into the final benchmark");

    std::string system_id;
    auto* translate = app.add_subcommand("translate", "run a candidate system over the benchmark");
    translate->add_option("--system", system_id, "system identifier (e.g. provider/model)")
        ->required();

    std::string eval_system;
    auto* evaluate = app.add_subcommand("evaluate", "score completed runs against the references");
    evaluate->add_option("--system", eval_system, "only this system (default: all runs)");

    app.add_subcommand("report", "rank systems and emit the report tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // bad usage is a validation failure
    }

    try {
        Config cfg = Config::parse_file(config_path);
        if (app.got_subcommand("align")) return cmd_align(cfg, translator);
        if (app.got_subcommand("verify")) return cmd_verify(cfg);
        if (app.got_subcommand("curate")) return cmd_curate(cfg);
        if (app.got_subcommand("translate")) return cmd_translate(cfg, system_id);
        if (app.got_subcommand("evaluate")) return cmd_evaluate(cfg, eval_system);
        if (app.got_subcommand("report")) return cmd_report(cfg);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ClientError& e) {
        std::cerr << "client error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

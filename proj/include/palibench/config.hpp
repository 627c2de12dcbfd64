// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <string>

#include "palibench/aligner.hpp"
#include "palibench/bench.hpp"
#include "palibench/curation.hpp"
#include "palibench/errors.hpp"
#include "palibench/normalize.hpp"
#include "palibench/verifier.hpp"

namespace palibench {

// Flat `key = value` configuration file; '#' starts a comment. Unknown keys
// are tolerated so configs can carry deployment extras.
class Config {
  public:
    Config() = default;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("io-error: cannot open config: " + path);
        Config cfg;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw ValidationError("config " + path + ":" + std::to_string(line_no) +
                                          ": expected key = value");
                continue;
            }
            auto trim = [](std::string s) {
                std::size_t b = s.find_first_not_of(" \t\r");
                std::size_t e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ValidationError("config " + path + ":" + std::to_string(line_no) +
                                      ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::string require(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end() || it->second.empty())
            throw ValidationError("config key required: " + key);
        return it->second;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ValidationError("config key " + key + ": expected a boolean, got '" + v + "'");
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            long long value = std::stoll(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return value;
        } catch (const std::exception&) {
            throw ValidationError("config key " + key + ": expected an integer, got '" +
                                  it->second + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            double value = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return value;
        } catch (const std::exception&) {
            throw ValidationError("config key " + key + ": expected a number, got '" + it->second +
                                  "'");
        }
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

inline NormalizationProfile profile_from_config(const Config& cfg) {
    NormalizationProfile p;
    p.unicode_form = cfg.get_bool("normalize.unicode", true);
    p.quote_folding = cfg.get_bool("normalize.quotes", true);
    p.dash_folding = cfg.get_bool("normalize.dashes", true);
    p.whitespace_collapse = cfg.get_bool("normalize.whitespace", true);
    p.list_number_strip = cfg.get_bool("normalize.list_numbers", true);
    p.case_fold = cfg.get_bool("normalize.case", true);
    return p;
}

inline FilterThresholds thresholds_from_config(const Config& cfg) {
    FilterThresholds t;
    t.min_chars = static_cast<std::size_t>(cfg.get_int("filter.min_chars", 100));
    t.max_pair_jaccard = cfg.get_double("filter.max_pair_jaccard", 0.90);
    t.max_length_ratio = cfg.get_double("filter.max_length_ratio", 2.0);
    t.dedup_jaccard = cfg.get_double("filter.dedup_jaccard", 0.85);
    t.ngram_order = static_cast<int>(cfg.get_int("filter.ngram_order", 3));
    t.min_dup_chars = static_cast<std::size_t>(cfg.get_int("filter.min_dup_chars", 25));
    t.validate();
    return t;
}

inline VerifierConfig verifier_config_from_config(const Config& cfg) {
    VerifierConfig v;
    v.profile = profile_from_config(cfg);
    v.head_tail_chars = static_cast<std::size_t>(cfg.get_int("verify.head_tail_chars", 15));
    return v;
}

inline AlignerConfig aligner_config_from_config(const Config& cfg) {
    AlignerConfig a;
    a.model = cfg.get("chat.model", "alignment-model");
    a.batch_size = static_cast<int>(cfg.get_int("align.batch_size", 20));
    a.max_batch_size = static_cast<int>(cfg.get_int("align.max_batch_size", 30));
    a.request_char_budget =
        static_cast<std::size_t>(cfg.get_int("align.request_char_budget", 400000));
    a.concurrency = static_cast<int>(cfg.get_int("chat.concurrency", 1));
    a.temperature = cfg.get_double("chat.temperature", 0.0);
    a.journal_path = cfg.get("align.journal", "");
    if (a.batch_size < 1 || a.batch_size > a.max_batch_size)
        throw ValidationError("align.batch_size must lie in [1, align.max_batch_size]");
    return a;
}

inline RetryPolicy retry_policy_from_config(const Config& cfg) {
    RetryPolicy p;
    p.max_attempts = static_cast<int>(cfg.get_int("chat.max_attempts", 3));
    p.backoff_ms = static_cast<int>(cfg.get_int("chat.backoff_ms", 0));
    if (p.max_attempts < 1) throw ValidationError("chat.max_attempts must be >= 1");
    return p;
}

inline EvalConfig eval_config_from_config(const Config& cfg) {
    EvalConfig e;
    e.outlier_threshold.value = cfg.get_double("eval.outlier_threshold", 2.0);
    e.outlier_threshold.validate();
    e.profile = profile_from_config(cfg);
    e.min_coverage = cfg.get_double("eval.min_coverage", 1.0);
    return e;
}

} // namespace palibench

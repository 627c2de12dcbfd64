// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "palibench/digest.hpp"
#include "palibench/errors.hpp"

namespace palibench {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }

    double norm() const {
        double s = 0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }

    void validate() const {
        if (values.empty()) throw ValidationError("embedding vector is empty");
        for (double v : values)
            if (!std::isfinite(v)) throw ValidationError("embedding vector has non-finite entry");
        if (norm() == 0.0) throw ValidationError("zero-vector embedding");
    }
};

// Providers turn text into vectors. The toolkit never embeds text itself;
// geometry is computable from any provider, including a plain lookup file.
class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;

    EmbeddingVector embed_one(const std::string& text) {
        auto v = embed({text});
        return std::move(v.front());
    }
};

// Vector-store file: one record per line, `<id> <dim> <v1> ... <vdim>`.
// Ids are free-form; texts resolve through their sha256 hex digest, so a
// store built for a fixed text set doubles as a deterministic embedder.
class FileVectorStore : public Embedder {
  public:
    explicit FileVectorStore(const std::string& path) : path_(path) {
        std::ifstream in(path);
        if (!in) throw IoError("io-error: cannot open vector store: " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string id;
            std::size_t dim = 0;
            if (!(ss >> id >> dim) || dim == 0)
                throw ValidationError("vector store " + path + ":" + std::to_string(line_no) +
                                      ": bad record");
            EmbeddingVector vec;
            vec.values.resize(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                if (!(ss >> vec.values[i]))
                    throw ValidationError("vector store " + path + ":" + std::to_string(line_no) +
                                          ": expected " + std::to_string(dim) + " values");
            }
            vec.validate();
            vectors_[id] = std::move(vec);
        }
    }

    bool contains(const std::string& id) const { return vectors_.count(id) != 0; }

    const EmbeddingVector& lookup(const std::string& id) const {
        auto it = vectors_.find(id);
        if (it == vectors_.end())
            throw ValidationError("vector store " + path_ + " has no entry for id " + id);
        return it->second;
    }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(lookup(sha256_hex(t)));
        return out;
    }

    static void write(const std::string& path,
                      const std::map<std::string, EmbeddingVector>& vectors) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("io-error: cannot write vector store: " + path);
        out.precision(17);
        for (const auto& [id, vec] : vectors) {
            out << id << ' ' << vec.dim();
            for (double v : vec.values) out << ' ' << v;
            out << '\n';
        }
    }

  private:
    std::string path_;
    std::map<std::string, EmbeddingVector> vectors_;
};

// Content-addressed wrapper: repeated texts never reach the inner provider
// again within or across runs sharing the same instance.
class CachingEmbedder : public Embedder {
  public:
    explicit CachingEmbedder(Embedder& inner) : inner_(inner) {}

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out(texts.size());
        std::vector<std::string> misses;
        std::vector<std::size_t> miss_at;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto it = cache_.find(sha256_hex(texts[i]));
            if (it != cache_.end()) {
                out[i] = it->second;
            } else {
                misses.push_back(texts[i]);
                miss_at.push_back(i);
            }
        }
        if (!misses.empty()) {
            auto fresh = inner_.embed(misses);
            for (std::size_t k = 0; k < misses.size(); ++k) {
                cache_[sha256_hex(misses[k])] = fresh[k];
                out[miss_at[k]] = std::move(fresh[k]);
            }
        }
        return out;
    }

  private:
    Embedder& inner_;
    std::map<std::string, EmbeddingVector> cache_;
};

// Digest-keyed append-only disk cache shared by the HTTP providers.
class EmbeddingCache {
  public:
    explicit EmbeddingCache(const std::string& path) : path_(path) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string digest;
            std::size_t dim = 0;
            if (!(ss >> digest >> dim)) continue;
            EmbeddingVector vec;
            vec.values.resize(dim);
            bool ok = true;
            for (std::size_t i = 0; i < dim && ok; ++i) ok = bool(ss >> vec.values[i]);
            if (ok) entries_[digest] = std::move(vec);
        }
    }

    const EmbeddingVector* find(const std::string& digest) const {
        auto it = entries_.find(digest);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void put(const std::string& digest, const EmbeddingVector& vec) {
        entries_[digest] = vec;
        std::ofstream out(path_, std::ios::app);
        out.precision(17);
        out << digest << ' ' << vec.dim();
        for (double v : vec.values) out << ' ' << v;
        out << '\n';
    }

  private:
    std::string path_;
    std::map<std::string, EmbeddingVector> entries_;
};

} // namespace palibench

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "palibench/corpus.hpp"
#include "palibench/errors.hpp"

namespace palibench {

// Corpus file: UTF-8 JSON lines. The first line is a header naming the
// translators and the anchor; every following line is one segment with
// fields "id", "source" and one field per translator (null allowed for
// aligned translators). Segments are written in SegmentId order, so a
// save/load cycle is byte-stable once the corpus is canonical.

inline void save_corpus(const AlignedCorpus& corpus, const std::string& path) {
    validate_corpus(corpus);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("io-error: cannot open for write: " + path);

    nlohmann::ordered_json header;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const auto& t : corpus.translators) names.push_back(t.name);
    header["translators"] = names;
    header["anchor"] = corpus.anchor().name;
    if (!corpus.provenance.empty()) {
        nlohmann::ordered_json prov;
        for (const auto& [k, v] : corpus.provenance) prov[k] = v;
        header["provenance"] = prov;
    }
    out << header.dump() << '\n';

    std::vector<const Segment*> segments;
    for (const auto& p : corpus.passages)
        for (const auto& s : p.segments) segments.push_back(&s);
    std::sort(segments.begin(), segments.end(),
              [](const Segment* a, const Segment* b) { return a->id < b->id; });

    for (const Segment* seg : segments) {
        nlohmann::ordered_json rec;
        rec["id"] = seg->id.raw();
        rec["source"] = seg->source_text;
        for (const auto& t : corpus.translators) {
            const auto* e = seg->entry(t.name);
            if (e == nullptr)
                throw ValidationError("segment " + seg->id.raw() + " has no entry for translator " +
                                      t.name + "; corpus not ready to save");
            if (e->has_value())
                rec[t.name] = **e;
            else
                rec[t.name] = nullptr;
        }
        out << rec.dump() << '\n';
    }
    if (!out) throw IoError("io-error: write failed: " + path);
}

inline AlignedCorpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("io-error: cannot open: " + path);

    auto schema_error = [&](int line_no, const std::string& why) {
        std::ostringstream msg;
        msg << "schema-violation: " << path << ":" << line_no << ": " << why;
        throw ValidationError(msg.str());
    };

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) schema_error(1, "missing header record");
    ++line_no;

    AlignedCorpus corpus;
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        schema_error(line_no, std::string("invalid header JSON: ") + e.what());
    }
    if (!header.is_object() || !header.contains("translators") || !header.contains("anchor"))
        schema_error(line_no, "header must carry 'translators' and 'anchor'");
    if (!header["translators"].is_array() || !header["anchor"].is_string())
        schema_error(line_no, "header field types");
    std::string anchor = header["anchor"].get<std::string>();
    for (const auto& name : header["translators"]) {
        if (!name.is_string()) schema_error(line_no, "translator names must be strings");
        std::string n = name.get<std::string>();
        corpus.translators.push_back(
            {n, n == anchor ? TranslatorRole::SegmentationAnchor : TranslatorRole::Aligned});
    }
    if (!corpus.has_translator(anchor)) schema_error(line_no, "anchor not in translator list");
    if (header.contains("provenance")) {
        for (auto it = header["provenance"].begin(); it != header["provenance"].end(); ++it) {
            if (!it.value().is_string()) schema_error(line_no, "provenance values must be strings");
            corpus.provenance[it.key()] = it.value().get<std::string>();
        }
    }

    std::vector<Segment> segments;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            schema_error(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string())
            schema_error(line_no, "segment record needs a string 'id'");
        std::string raw_id = rec["id"].get<std::string>();
        Segment seg;
        try {
            seg.id = parse_segment_id(raw_id);
        } catch (const ValidationError& e) {
            schema_error(line_no, e.what());
        }
        if (!rec.contains("source") || !rec["source"].is_string())
            schema_error(line_no, "segment " + raw_id + " needs a string 'source'");
        seg.source_text = rec["source"].get<std::string>();
        for (const auto& t : corpus.translators) {
            if (!rec.contains(t.name))
                schema_error(line_no, "segment " + raw_id + " missing translator key '" + t.name + "'");
            const auto& v = rec[t.name];
            if (v.is_null()) {
                if (t.role == TranslatorRole::SegmentationAnchor)
                    schema_error(line_no, "segment " + raw_id + " has null anchor translation");
                seg.translations[t.name] = std::nullopt;
            } else if (v.is_string()) {
                seg.translations[t.name] = v.get<std::string>();
            } else {
                schema_error(line_no, "segment " + raw_id + " translator '" + t.name +
                                          "' must be string or null");
            }
        }
        for (auto it = rec.begin(); it != rec.end(); ++it) {
            if (it.key() != "id" && it.key() != "source" && !corpus.has_translator(it.key()))
                schema_error(line_no, "segment " + raw_id + " has unknown field '" + it.key() + "'");
        }
        segments.push_back(std::move(seg));
    }

    try {
        corpus.passages = group_segments_into_passages(std::move(segments));
        validate_corpus(corpus);
    } catch (const ValidationError& e) {
        throw ValidationError("schema-violation: " + path + ": " + e.what());
    }
    return corpus;
}

} // namespace palibench

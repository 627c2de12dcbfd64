// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "palibench/errors.hpp"

namespace palibench {

// Hierarchical segment identifier like "mn2:1.3": document part before the
// colon, dot-separated numeric path after it. Parsing is strict enough that
// doc + path always re-serializes to the original string.
struct SegmentId {
    std::string doc;
    std::vector<long long> path;

    std::string raw() const {
        std::string out = doc;
        out.push_back(':');
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i > 0) out.push_back('.');
            out += std::to_string(path[i]);
        }
        return out;
    }

    // doc byte-wise, then path element-wise numerically.
    friend std::strong_ordering operator<=>(const SegmentId& a, const SegmentId& b) {
        if (auto c = a.doc <=> b.doc; c != 0) return c;
        std::size_t n = std::min(a.path.size(), b.path.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (auto c = a.path[i] <=> b.path[i]; c != 0) return c;
        }
        return a.path.size() <=> b.path.size();
    }
    friend bool operator==(const SegmentId& a, const SegmentId& b) {
        return a.doc == b.doc && a.path == b.path;
    }
};

inline SegmentId parse_segment_id(std::string_view raw) {
    auto fail = [&](const char* why) {
        throw ValidationError("malformed-id: \"" + std::string(raw) + "\": " + why);
    };
    if (raw.empty()) fail("empty");
    std::size_t colon = raw.find(':');
    if (colon == std::string_view::npos) fail("missing ':'");
    if (colon == 0) fail("empty document part");
    SegmentId id;
    id.doc = std::string(raw.substr(0, colon));
    if (id.doc.find(':') != std::string::npos) fail("':' in document part");
    std::string_view rest = raw.substr(colon + 1);
    if (rest.empty()) fail("empty path");
    std::size_t start = 0;
    while (true) {
        std::size_t dot = rest.find('.', start);
        std::string_view elem = rest.substr(start, dot == std::string_view::npos ? dot : dot - start);
        if (elem.empty()) fail("empty path element");
        if (elem.size() > 1 && elem[0] == '0') fail("leading zero in path element");
        long long value = 0;
        for (char ch : elem) {
            if (ch < '0' || ch > '9') fail("non-numeric path element");
            value = value * 10 + (ch - '0');
        }
        id.path.push_back(value);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return id;
}

// Doc plus first path element, e.g. "mn2:1" for "mn2:1.3". Passages order
// byte-wise on the raw string, so "mn10:1" sorts before "mn2:1".
struct PassageId {
    std::string raw;

    static PassageId of(const SegmentId& id) {
        return PassageId{id.doc + ":" + std::to_string(id.path.front())};
    }

    friend std::strong_ordering operator<=>(const PassageId& a, const PassageId& b) = default;
};

} // namespace palibench

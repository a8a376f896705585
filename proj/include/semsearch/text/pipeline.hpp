#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/common/ranking.hpp"
#include "semsearch/text/unicode.hpp"

namespace semsearch {

/// A corpus paragraph: the unit of retrieval.
struct statement {
    statement_id id = 0;
    std::string raw;
    std::vector<std::string> tokens;
};

/// Exact-match set of lowercase stop words.
class stopword_set {
public:
    stopword_set() = default;

    template <typename Range>
    explicit stopword_set(const Range& words) {
        for (const auto& w : words) insert(w);
    }

    stopword_set(std::initializer_list<std::string_view> words) {
        for (auto w : words) insert(w);
    }

    void insert(std::string_view word) {
        auto w = unicode::lowercase(unicode::trim_space(word));
        if (!w.empty()) words_.insert(std::move(w));
    }

    bool contains(std::string_view token) const { return words_.contains(std::string(token)); }
    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

    /// Sorted copy of the entries.
    std::vector<std::string> words() const {
        std::vector<std::string> out(words_.begin(), words_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::unordered_set<std::string> words_;
};

/// One word per line; text after '#' is a comment.
inline stopword_set parse_stopwords(std::string_view text) {
    stopword_set set;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        set.insert(line);
        pos = nl + 1;
    }
    return set;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline stopword_set load_stopwords(const std::string& path) { return parse_stopwords(read_file(path)); }

inline std::string normalize_text(std::string_view raw) { return unicode::lowercase(raw); }

enum class paragraph_delimiter {
    newline,     ///< any run of one or more newlines ends a paragraph
    blank_line,  ///< only a (white-space-only) blank line ends a paragraph
};

/// Splits raw text into paragraphs, trimming surrounding white space and
/// discarding empty segments. Ids are assigned in document order.
inline std::vector<statement> segment_paragraphs(std::string_view raw,
                                                 paragraph_delimiter delimiter = paragraph_delimiter::newline) {
    std::vector<statement> out;
    auto emit = [&](std::string_view segment) {
        const auto trimmed = unicode::trim_space(segment);
        if (!trimmed.empty()) out.push_back({out.size(), std::string(trimmed), {}});
    };

    std::size_t segment_begin = 0;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto nl = raw.find('\n', pos);
        if (nl == std::string_view::npos) nl = raw.size();
        if (delimiter == paragraph_delimiter::newline) {
            emit(raw.substr(pos, nl - pos));
        } else {
            const auto line = raw.substr(pos, nl - pos);
            if (unicode::trim_space(line).empty()) {
                emit(raw.substr(segment_begin, pos - segment_begin));
                segment_begin = nl + 1;
            }
        }
        pos = nl + 1;
    }
    if (delimiter == paragraph_delimiter::blank_line && segment_begin < raw.size())
        emit(raw.substr(segment_begin));
    return out;
}

/// Lowercases, splits on white space, strips punctuation from token edges
/// and drops empty tokens and stop words. No stemming.
inline std::vector<std::string> tokenize(std::string_view raw, const stopword_set& stops) {
    const auto text = normalize_text(raw);
    const std::string_view view{text};
    std::vector<std::string> tokens;

    auto flush = [&](std::size_t begin, std::size_t end) {
        if (begin >= end) return;
        const auto core = unicode::trim_if(view.substr(begin, end - begin),
                                           [](char32_t cp) { return unicode::is_punctuation(cp); });
        if (!core.empty() && !stops.contains(core)) tokens.emplace_back(core);
    };

    std::size_t word_begin = 0;
    std::size_t pos = 0;
    while (pos < view.size()) {
        const auto d = unicode::decode(view, pos);
        if (d.valid && unicode::is_space(d.cp)) {
            flush(word_begin, pos);
            word_begin = pos + d.length;
        }
        pos += d.length;
    }
    flush(word_begin, view.size());
    return tokens;
}

/// Segments and tokenizes a whole corpus.
inline std::vector<statement> ingest_corpus(std::string_view raw, const stopword_set& stops,
                                            paragraph_delimiter delimiter = paragraph_delimiter::newline) {
    auto statements = segment_paragraphs(raw, delimiter);
    for (auto& s : statements) s.tokens = tokenize(s.raw, stops);
    return statements;
}

}  // namespace semsearch

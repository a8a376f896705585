#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/embedding/table.hpp"
#include "semsearch/text/unicode.hpp"

namespace semsearch {

/// Splits a UTF-8 string into code point substrings.
inline std::vector<std::string_view> code_points(std::string_view s) {
    std::vector<std::string_view> out;
    for (std::size_t pos = 0; pos < s.size();) {
        const auto d = unicode::decode(s, pos);
        out.push_back(s.substr(pos, d.length));
        pos += d.length;
    }
    return out;
}

/// Character n-grams of "<token>" with lengths in [nmin, nmax] code points,
/// ordered by start position then length. The whole wrapped word is
/// included when it fits within nmax. Lone boundary markers are skipped.
inline std::vector<std::string> extract_ngrams(std::string_view token, std::size_t nmin = 3, std::size_t nmax = 6) {
    if (token.empty()) throw error("cannot extract n-grams of an empty token");
    if (nmin < 1 || nmin > nmax) throw error("n-gram bounds must satisfy 1 <= nmin <= nmax");

    const std::string wrapped = "<" + std::string(token) + ">";
    const auto cps = code_points(wrapped);
    std::vector<std::string> grams;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        std::string gram;
        for (std::size_t n = 1; n <= nmax && i + n <= cps.size(); ++n) {
            gram.append(cps[i + n - 1]);
            if (n < nmin) continue;
            if (n == 1 && (i == 0 || i + 1 == cps.size())) continue;
            grams.push_back(gram);
        }
    }
    return grams;
}

/// Subword vectors keyed by character n-gram (boundary markers included).
class ngram_table {
public:
    ngram_table(embedding_table vectors, std::size_t nmin = 3, std::size_t nmax = 6)
        : vectors_(std::move(vectors)), nmin_(nmin), nmax_(nmax) {
        if (nmin_ < 1 || nmin_ > nmax_) throw error("n-gram bounds must satisfy 1 <= nmin <= nmax");
        for (const auto& key : vectors_.tokens()) {
            const auto len = code_points(key).size();
            if (len < nmin_ || len > nmax_)
                throw format_error("n-gram '" + key + "' has length " + std::to_string(len) + " outside [" +
                                   std::to_string(nmin_) + ", " + std::to_string(nmax_) + "]");
        }
    }

    const embedding_table& vectors() const { return vectors_; }
    std::size_t dim() const { return vectors_.dim(); }
    std::size_t nmin() const { return nmin_; }
    std::size_t nmax() const { return nmax_; }

private:
    embedding_table vectors_;
    std::size_t nmin_;
    std::size_t nmax_;
};

/// Stored row for in-vocabulary tokens; otherwise the sum of the known
/// n-gram vectors (absent when none are known or no n-gram table is given).
inline std::optional<std::vector<float>> lookup_or_synthesize(const embedding_table& table, const ngram_table* ngrams,
                                                              std::string_view token) {
    if (auto row = table.vector_of(token)) return std::vector<float>(row->begin(), row->end());
    if (ngrams == nullptr || token.empty()) return std::nullopt;
    if (ngrams->dim() != table.dim()) throw error("n-gram table dimension differs from the word table");

    std::vector<float> sum(table.dim(), 0.0f);
    bool any = false;
    for (const auto& gram : extract_ngrams(token, ngrams->nmin(), ngrams->nmax())) {
        if (auto row = ngrams->vectors().vector_of(gram)) {
            for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += (*row)[j];
            any = true;
        }
    }
    if (!any) return std::nullopt;
    return sum;
}

}  // namespace semsearch

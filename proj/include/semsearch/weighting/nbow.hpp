#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/embedding/table.hpp"

namespace semsearch {

/// Normalized bag-of-words: unique tokens (sorted) with weights summing to 1.
struct nbow_vector {
    std::vector<std::string> tokens;
    std::vector<double> weights;
    /// Token occurrences removed because no vector could be resolved.
    std::size_t dropped = 0;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    friend bool operator==(const nbow_vector&, const nbow_vector&) = default;
};

/// Builds the nBOW of the tokens accepted by `keep`; weight = count / total.
template <typename Keep>
nbow_vector nbow_if(const std::vector<std::string>& tokens, Keep keep) {
    std::map<std::string, std::size_t> counts;
    nbow_vector out;
    std::size_t total = 0;
    for (const auto& t : tokens) {
        if (!keep(t)) {
            ++out.dropped;
            continue;
        }
        ++counts[t];
        ++total;
    }
    if (total == 0) throw empty_document_error("document is empty after filtering");
    out.tokens.reserve(counts.size());
    out.weights.reserve(counts.size());
    for (const auto& [token, count] : counts) {
        out.tokens.push_back(token);
        out.weights.push_back(static_cast<double>(count) / static_cast<double>(total));
    }
    return out;
}

inline nbow_vector nbow(const std::vector<std::string>& tokens) {
    return nbow_if(tokens, [](const std::string&) { return true; });
}

/// Tokens without a row in `table` are dropped before normalizing.
inline nbow_vector nbow(const std::vector<std::string>& tokens, const embedding_table& table) {
    return nbow_if(tokens, [&](const std::string& t) { return table.contains(t); });
}

}  // namespace semsearch

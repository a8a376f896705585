#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace semsearch {

using statement_id = std::size_t;

/// One ranked hit. Scores are descending-better for every backend.
struct scored_statement {
    statement_id id = 0;
    double score = 0.0;

    friend bool operator==(const scored_statement&, const scored_statement&) = default;
};

/// Higher score first, then lower id.
inline bool ranks_before(const scored_statement& a, const scored_statement& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
}

/// Keeps the best k entries in rank order.
inline std::vector<scored_statement> top_k(std::vector<scored_statement> all, std::size_t k) {
    const auto keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    return all;
}

}  // namespace semsearch

#pragma once

#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/text/pipeline.hpp"

namespace semsearch {

using sparse_matrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// TF-IDF weighted term x document matrix.
///
/// weight(t, d) = count(t, d) * ln(N / df(t)) with N the number of
/// non-empty statements. Terms occurring in every column have idf 0 and are
/// dropped, so no row is all-zero.
struct term_document_matrix {
    std::vector<std::string> terms;        ///< sorted, one per row
    std::vector<double> idf;               ///< per row
    std::vector<statement_id> doc_ids;     ///< one per column, ascending
    std::vector<statement_id> excluded;    ///< statements with no tokens
    sparse_matrix weights;

    std::unordered_map<std::string, std::size_t> term_index() const {
        std::unordered_map<std::string, std::size_t> index;
        index.reserve(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) index.emplace(terms[i], i);
        return index;
    }
};

inline term_document_matrix tfidf_matrix(const std::vector<statement>& corpus) {
    term_document_matrix m;
    std::vector<std::map<std::string, std::size_t>> counts;
    std::map<std::string, std::size_t> df;
    for (const auto& s : corpus) {
        if (s.tokens.empty()) {
            m.excluded.push_back(s.id);
            continue;
        }
        m.doc_ids.push_back(s.id);
        auto& c = counts.emplace_back();
        for (const auto& t : s.tokens) ++c[t];
        for (const auto& entry : c) ++df[entry.first];
    }
    if (m.doc_ids.empty()) throw empty_document_error("corpus has no non-empty statements");

    const auto n_docs = static_cast<double>(m.doc_ids.size());
    std::unordered_map<std::string, std::size_t> row_of;
    for (const auto& [term, freq] : df) {
        const double idf = std::log(n_docs / static_cast<double>(freq));
        if (idf <= 0.0) continue;
        row_of.emplace(term, m.terms.size());
        m.terms.push_back(term);
        m.idf.push_back(idf);
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t col = 0; col < counts.size(); ++col) {
        for (const auto& [term, count] : counts[col]) {
            const auto it = row_of.find(term);
            if (it == row_of.end()) continue;
            triplets.emplace_back(static_cast<int>(it->second), static_cast<int>(col),
                                  static_cast<double>(count) * m.idf[it->second]);
        }
    }
    m.weights.resize(static_cast<Eigen::Index>(m.terms.size()), static_cast<Eigen::Index>(m.doc_ids.size()));
    m.weights.setFromTriplets(triplets.begin(), triplets.end());
    m.weights.makeCompressed();
    return m;
}

}  // namespace semsearch

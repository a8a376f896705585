#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "semsearch/common/random.hpp"
#include "semsearch/embedding/table.hpp"
#include "semsearch/transport/distances.hpp"
#include "support/oracles.hpp"

namespace fixture {

/// Embedded document with exact rational weights and its own vector storage.
struct random_doc {
    std::unique_ptr<semsearch::embedding_table> storage;
    semsearch::embedded_document doc;
};

inline random_doc make_random_doc(std::size_t n, std::size_t dim, semsearch::rng& gen, const std::string& prefix) {
    random_doc out{std::make_unique<semsearch::embedding_table>(dim), {}};
    const auto weights = oracle::random_rational_weights(n, gen);
    std::vector<float> v(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : v) x = static_cast<float>(gen.uniform(-1.0, 1.0));
        out.storage->add(prefix + std::to_string(i), v);
    }
    out.doc.centroid.assign(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.doc.bow.tokens.push_back(out.storage->token(i));
        out.doc.bow.weights.push_back(weights[i]);
        out.doc.vectors.push_back(out.storage->row(i));
        for (std::size_t k = 0; k < dim; ++k)
            out.doc.centroid[k] += weights[i] * static_cast<double>(out.storage->row(i)[k]);
    }
    return out;
}

/// Vocabulary of `words` random `dim`-d vectors named w0, w1, ...
inline semsearch::embedding_table random_vocabulary(std::size_t words, std::size_t dim, semsearch::rng& gen) {
    semsearch::embedding_table table(dim);
    std::vector<float> v(dim);
    for (std::size_t i = 0; i < words; ++i) {
        for (auto& x : v) x = static_cast<float>(gen.uniform(-1.0, 1.0));
        table.add("w" + std::to_string(i), v);
    }
    return table;
}

/// Random token lists over a random_vocabulary.
inline std::vector<std::vector<std::string>> random_token_lists(std::size_t count, std::size_t vocab,
                                                                std::size_t max_len, semsearch::rng& gen) {
    std::vector<std::vector<std::string>> docs(count);
    for (auto& d : docs) {
        const auto len = 1 + gen.below(max_len);
        for (std::size_t i = 0; i < len; ++i) d.push_back("w" + std::to_string(gen.below(vocab)));
    }
    return docs;
}

}  // namespace fixture

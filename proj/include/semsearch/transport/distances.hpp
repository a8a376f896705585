#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/embedding/table.hpp"
#include "semsearch/transport/ground_metric.hpp"
#include "semsearch/transport/transport_simplex.hpp"
#include "semsearch/weighting/nbow.hpp"

namespace semsearch {

/// A document as weighted word vectors: its nBOW plus one vector per unique
/// token (spans into storage owned elsewhere) and the weighted centroid.
struct embedded_document {
    nbow_vector bow;
    std::vector<std::span<const float>> vectors;
    std::vector<double> centroid;

    std::size_t size() const { return bow.size(); }
    bool empty() const { return bow.empty(); }
};

/// `resolve(token)` returns std::optional<std::span<const float>>; tokens it
/// cannot resolve are dropped and counted in bow.dropped.
template <typename Resolver>
embedded_document embed_document_with(const std::vector<std::string>& tokens, Resolver&& resolve) {
    embedded_document doc;
    doc.bow = nbow_if(tokens, [&](const std::string& t) { return resolve(t).has_value(); });
    doc.vectors.reserve(doc.bow.size());
    for (std::size_t i = 0; i < doc.bow.size(); ++i) {
        const auto v = *resolve(doc.bow.tokens[i]);
        if (doc.centroid.empty()) doc.centroid.assign(v.size(), 0.0);
        for (std::size_t k = 0; k < v.size(); ++k) doc.centroid[k] += doc.bow.weights[i] * static_cast<double>(v[k]);
        doc.vectors.push_back(v);
    }
    return doc;
}

inline embedded_document embed_document(const std::vector<std::string>& tokens, const embedding_table& table) {
    return embed_document_with(tokens, [&](const std::string& t) { return table.vector_of(t); });
}

/// Ground distances between the unique tokens of two documents.
struct cost_matrix {
    std::vector<std::string> row_tokens;
    std::vector<std::string> col_tokens;
    std::vector<double> values;  ///< row-major

    std::size_t rows() const { return row_tokens.size(); }
    std::size_t cols() const { return col_tokens.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }

    cost_matrix transposed() const {
        cost_matrix t{col_tokens, row_tokens, std::vector<double>(values.size())};
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j) t.values[j * rows() + i] = (*this)(i, j);
        return t;
    }
};

inline cost_matrix make_cost_matrix(const embedded_document& src, const embedded_document& dst, ground_metric metric) {
    cost_matrix c{src.bow.tokens, dst.bow.tokens, std::vector<double>(src.size() * dst.size())};
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < dst.size(); ++j)
            c.values[i * dst.size() + j] = ground_distance(src.vectors[i], dst.vectors[j], metric);
    return c;
}

/// Cost matrix straight from token lists; every token must have a row.
inline cost_matrix make_cost_matrix(const embedding_table& table, const std::vector<std::string>& src,
                                    const std::vector<std::string>& dst, ground_metric metric) {
    auto vec = [&](const std::string& t) {
        const auto v = table.vector_of(t);
        if (!v) throw error("token '" + t + "' has no vector; filter it before building a cost matrix");
        return *v;
    };
    cost_matrix c{src, dst, std::vector<double>(src.size() * dst.size())};
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < dst.size(); ++j) c.values[i * dst.size() + j] = ground_distance(vec(src[i]), vec(dst[j]), metric);
    return c;
}

struct wmd_result {
    double distance = 0.0;
    transport::transport_plan plan;
};

namespace detail {

inline void check_alignment(const nbow_vector& src, const nbow_vector& dst, const cost_matrix& c) {
    if (src.empty() || dst.empty()) throw empty_document_error("word mover's distance of an empty document");
    if (c.rows() != src.size() || c.cols() != dst.size())
        throw error("cost matrix is not aligned with the two documents");
}

}  // namespace detail

/// Exact word mover's distance: the optimal transport cost between the two
/// nBOW distributions under ground costs c.
inline wmd_result wmd(const nbow_vector& src, const nbow_vector& dst, const cost_matrix& c) {
    detail::check_alignment(src, dst, c);
    if (src.tokens == dst.tokens && src.weights == dst.weights) {
        wmd_result r;
        r.plan.rows = r.plan.cols = src.size();
        r.plan.flow.assign(src.size() * src.size(), 0.0);
        for (std::size_t i = 0; i < src.size(); ++i) {
            r.plan.flow[i * src.size() + i] = src.weights[i];
            r.plan.objective += src.weights[i] * c(i, i);
        }
        r.distance = r.plan.objective;
        return r;
    }
    wmd_result r;
    r.plan = transport::solve_transport(src.weights, dst.weights, c.values);
    r.distance = r.plan.objective;
    return r;
}

inline wmd_result wmd(const embedded_document& src, const embedded_document& dst, ground_metric metric) {
    return wmd(src.bow, dst.bow, make_cost_matrix(src, dst, metric));
}

/// Relaxed WMD: each side ships all of its mass to the nearest word of the
/// other side; the larger of the two relaxations. Never exceeds wmd().
inline double rwmd(const nbow_vector& src, const nbow_vector& dst, const cost_matrix& c) {
    detail::check_alignment(src, dst, c);
    std::vector<double> col_min(c.cols(), std::numeric_limits<double>::infinity());
    double from_src = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        double row_min = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c.cols(); ++j) {
            row_min = std::min(row_min, c(i, j));
            col_min[j] = std::min(col_min[j], c(i, j));
        }
        from_src += src.weights[i] * row_min;
    }
    double from_dst = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) from_dst += dst.weights[j] * col_min[j];
    return std::max(from_src, from_dst);
}

inline double rwmd(const embedded_document& src, const embedded_document& dst, ground_metric metric) {
    return rwmd(src.bow, dst.bow, make_cost_matrix(src, dst, metric));
}

/// Word centroid distance: the ground metric between nBOW-weighted mean
/// vectors. A lower bound on wmd() under the euclidean metric.
inline double wcd(const embedded_document& src, const embedded_document& dst, ground_metric metric) {
    if (src.empty() || dst.empty()) throw empty_document_error("centroid distance of an empty document");
    return ground_distance(src.centroid, dst.centroid, metric);
}

}  // namespace semsearch

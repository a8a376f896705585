#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "semsearch/common/binary_io.hpp"
#include "semsearch/common/errors.hpp"
#include "semsearch/common/ranking.hpp"
#include "semsearch/lsa/svd.hpp"
#include "semsearch/text/pipeline.hpp"
#include "semsearch/weighting/tfidf.hpp"

namespace semsearch::lsa {

/// Truncated-SVD latent space over the TF-IDF matrix of a corpus.
class model {
public:
    model() = default;

    /// k is clipped to min(terms, documents) and then to the numerical rank,
    /// so every stored singular value is positive.
    static model build(const std::vector<statement>& corpus, std::size_t k, const svd_options& opts = {}) {
        auto tdm = tfidf_matrix(corpus);
        if (tdm.terms.empty())
            throw empty_document_error("no term discriminates between statements (every term has idf 0)");
        const auto full = std::min(tdm.terms.size(), tdm.doc_ids.size());
        const auto want = std::min(k, full);
        if (want == 0) throw error("LSA dimension must be positive");
        auto svd = truncated_svd(tdm.weights, want, opts);

        Eigen::Index rank = 0;
        const double floor = svd.s.size() > 0 ? svd.s(0) * 1e-10 : 0.0;
        while (rank < svd.s.size() && svd.s(rank) > floor) ++rank;
        if (rank == 0) throw error("TF-IDF matrix is numerically zero");

        model m;
        m.terms_ = std::move(tdm.terms);
        m.idf_ = std::move(tdm.idf);
        m.doc_ids_ = std::move(tdm.doc_ids);
        m.excluded_ = std::move(tdm.excluded);
        m.singular_values_ = svd.s.head(rank);
        m.term_vectors_ = svd.u.leftCols(rank);
        m.doc_vectors_ = svd.v.leftCols(rank);
        m.svd_iterations_ = svd.iterations;
        m.rebuild_lookup();
        return m;
    }

    std::size_t k() const { return static_cast<std::size_t>(singular_values_.size()); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<double>& idf() const { return idf_; }
    const std::vector<statement_id>& doc_ids() const { return doc_ids_; }
    const std::vector<statement_id>& excluded() const { return excluded_; }
    const Eigen::VectorXd& singular_values() const { return singular_values_; }
    const Eigen::MatrixXd& term_vectors() const { return term_vectors_; }
    const Eigen::MatrixXd& doc_vectors() const { return doc_vectors_; }
    int svd_iterations() const { return svd_iterations_; }

    /// Latent representation used for ranking: row d of V_k * diag(S_k).
    Eigen::VectorXd document_vector(std::size_t column) const {
        return doc_vectors_.row(static_cast<Eigen::Index>(column)).transpose().cwiseProduct(singular_values_);
    }

    /// TF-IDF vector of a query over the model's terms. Unknown terms are
    /// counted in `unknown`.
    Eigen::VectorXd query_term_vector(const std::vector<std::string>& tokens, std::size_t* unknown = nullptr) const {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms_.size()));
        std::size_t missing = 0;
        for (const auto& t : tokens) {
            const auto it = lookup_.find(t);
            if (it == lookup_.end()) {
                ++missing;
                continue;
            }
            q(static_cast<Eigen::Index>(it->second)) += idf_[it->second];
        }
        if (unknown) *unknown = missing;
        return q;
    }

    /// Folding-in: S_k^-1 U_k^T q.
    Eigen::VectorXd fold_in(const std::vector<std::string>& tokens, std::size_t* unknown = nullptr) const {
        std::size_t missing = 0;
        const auto q = query_term_vector(tokens, &missing);
        if (unknown) *unknown = missing;
        if (missing == tokens.size()) throw empty_query_error("query has no terms known to the LSA model");
        return singular_values_.cwiseInverse().asDiagonal() * (term_vectors_.transpose() * q);
    }

    /// Cosine between the folded query and each document's scaled latent
    /// vector; best k_results, ties by ascending id.
    std::vector<scored_statement> rank(const std::vector<std::string>& tokens, std::size_t k_results,
                                       std::size_t* unknown = nullptr) const {
        const auto qhat = fold_in(tokens, unknown);
        std::vector<scored_statement> scored;
        scored.reserve(doc_ids_.size());
        for (std::size_t c = 0; c < doc_ids_.size(); ++c) scored.push_back({doc_ids_[c], cosine(qhat, document_vector(c))});
        return top_k(std::move(scored), k_results);
    }

    static double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const double na = a.norm();
        const double nb = b.norm();
        if (na == 0.0 || nb == 0.0) return 0.0;
        return a.dot(b) / (na * nb);
    }

    void save(std::ostream& out) const {
        io::write_header(out, "SSLSA", 1);
        io::write(out, terms_);
        io::write(out, idf_);
        io::write(out, to_u64(doc_ids_));
        io::write(out, to_u64(excluded_));
        io::write<std::uint64_t>(out, k());
        write_matrix(out, singular_values_);
        write_matrix(out, term_vectors_);
        write_matrix(out, doc_vectors_);
    }

    static model load(std::istream& in) {
        io::read_header(in, "SSLSA", 1);
        model m;
        m.terms_ = io::read_strings(in);
        m.idf_ = io::read_vector<double>(in);
        m.doc_ids_ = from_u64(io::read_vector<std::uint64_t>(in));
        m.excluded_ = from_u64(io::read_vector<std::uint64_t>(in));
        const auto k = io::read<std::uint64_t>(in);
        m.singular_values_ = read_matrix(in);
        m.term_vectors_ = read_matrix(in);
        m.doc_vectors_ = read_matrix(in);
        if (m.idf_.size() != m.terms_.size() || static_cast<std::uint64_t>(m.singular_values_.size()) != k ||
            m.term_vectors_.rows() != static_cast<Eigen::Index>(m.terms_.size()) ||
            m.doc_vectors_.rows() != static_cast<Eigen::Index>(m.doc_ids_.size()) ||
            m.term_vectors_.cols() != static_cast<Eigen::Index>(k) || m.doc_vectors_.cols() != static_cast<Eigen::Index>(k))
            throw format_error("inconsistent LSA model dimensions");
        m.rebuild_lookup();
        return m;
    }

private:
    static std::vector<std::uint64_t> to_u64(const std::vector<statement_id>& v) { return {v.begin(), v.end()}; }
    static std::vector<statement_id> from_u64(const std::vector<std::uint64_t>& v) { return {v.begin(), v.end()}; }

    static void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
        io::write<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
        io::write<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) io::write<double>(out, m(i, j));
    }

    static Eigen::MatrixXd read_matrix(std::istream& in) {
        const auto rows = io::read_size(in, 1ull << 32);
        const auto cols = io::read_size(in, 1ull << 32);
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = io::read<double>(in);
        return m;
    }

    void rebuild_lookup() {
        lookup_.clear();
        for (std::size_t i = 0; i < terms_.size(); ++i) lookup_.emplace(terms_[i], i);
    }

    std::vector<std::string> terms_;
    std::vector<double> idf_;
    std::vector<statement_id> doc_ids_;
    std::vector<statement_id> excluded_;
    Eigen::VectorXd singular_values_;
    Eigen::MatrixXd term_vectors_;
    Eigen::MatrixXd doc_vectors_;
    int svd_iterations_ = 0;
    std::unordered_map<std::string, std::size_t> lookup_;
};

}  // namespace semsearch::lsa

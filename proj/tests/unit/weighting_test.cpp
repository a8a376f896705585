#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "semsearch/common/random.hpp"
#include "semsearch/weighting/nbow.hpp"
#include "semsearch/weighting/tfidf.hpp"

using namespace semsearch;

namespace {

statement doc(statement_id id, std::vector<std::string> tokens) { return {id, "", std::move(tokens)}; }

double weight_of(const nbow_vector& v, const std::string& t) {
    const auto it = std::find(v.tokens.begin(), v.tokens.end(), t);
    return it == v.tokens.end() ? 0.0 : v.weights[static_cast<std::size_t>(it - v.tokens.begin())];
}

}  // namespace

TEST(Nbow, CountsOverTotal) {
    const auto v = nbow({"a", "a", "b"});
    EXPECT_EQ(v.tokens, (std::vector<std::string>{"a", "b"}));
    EXPECT_DOUBLE_EQ(v.weights[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(v.weights[1], 1.0 / 3.0);

    const auto single = nbow({"x"});
    EXPECT_EQ(single.weights, std::vector<double>{1.0});
}

TEST(Nbow, DropsTokensWithoutVectors) {
    embedding_table table(1);
    table.add("a", std::vector<float>{1});
    table.add("b", std::vector<float>{2});
    const auto v = nbow({"a", "b", "c"}, table);
    EXPECT_EQ(v.tokens, (std::vector<std::string>{"a", "b"}));
    EXPECT_DOUBLE_EQ(v.weights[0], 0.5);
    EXPECT_DOUBLE_EQ(v.weights[1], 0.5);
    EXPECT_EQ(v.dropped, 1u);
    EXPECT_THROW(nbow({"c", "d"}, table), empty_document_error);
    EXPECT_THROW(nbow({}), empty_document_error);
}

TEST(Nbow, PropertiesOnRandomInputs) {
    rng gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> tokens;
        const auto len = 1 + gen.below(30);
        for (std::size_t i = 0; i < len; ++i) tokens.push_back("w" + std::to_string(gen.below(8)));
        const auto v = nbow(tokens);
        EXPECT_NEAR(std::accumulate(v.weights.begin(), v.weights.end(), 0.0), 1.0, 1e-9);
        EXPECT_TRUE(std::is_sorted(v.tokens.begin(), v.tokens.end()));
        EXPECT_EQ(std::set<std::string>(v.tokens.begin(), v.tokens.end()).size(), v.tokens.size());
        for (double w : v.weights) EXPECT_GT(w, 0.0);

        auto shuffled = tokens;
        for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[gen.below(i)]);
        EXPECT_EQ(nbow(shuffled), v);
    }
}

TEST(Tfidf, HandComputedFixture) {
    // 3 documents over 5 distinct terms. banana occurs everywhere (idf 0).
    const std::vector<statement> corpus{doc(0, {"apple", "banana", "apple", "cherry"}), doc(1, {"banana", "date"}),
                                        doc(2, {"apple", "egg", "egg", "banana"})};
    const auto m = tfidf_matrix(corpus);
    EXPECT_EQ(m.terms, (std::vector<std::string>{"apple", "cherry", "date", "egg"}));
    EXPECT_EQ(m.doc_ids, (std::vector<statement_id>{0, 1, 2}));

    const double ln15 = std::log(1.5);
    const double ln3 = std::log(3.0);
    const double expected[4][3] = {{2 * ln15, 0, ln15}, {ln3, 0, 0}, {0, ln3, 0}, {0, 0, 2 * ln3}};
    const Eigen::MatrixXd dense(m.weights);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(dense(r, c), expected[r][c]) << r << "," << c;
    EXPECT_DOUBLE_EQ(m.idf[0], ln15);
}

TEST(Tfidf, TermInEveryDocumentIsDropped) {
    const auto m = tfidf_matrix({doc(0, {"a", "b"}), doc(1, {"a", "c"})});
    EXPECT_EQ(m.terms, (std::vector<std::string>{"b", "c"}));
    const auto single = tfidf_matrix({doc(0, {"x", "x"})});
    EXPECT_TRUE(single.terms.empty());
    EXPECT_EQ(single.weights.nonZeros(), 0);
}

TEST(Tfidf, EmptyStatementsExcluded) {
    const auto m = tfidf_matrix({doc(0, {"a"}), doc(1, {}), doc(2, {"b"})});
    EXPECT_EQ(m.doc_ids, (std::vector<statement_id>{0, 2}));
    EXPECT_EQ(m.excluded, std::vector<statement_id>{1});
    EXPECT_THROW(tfidf_matrix({doc(0, {}), doc(1, {})}), empty_document_error);
}

TEST(Tfidf, MatchesBruteForceRecountUnderDuplication) {
    rng gen(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<statement> corpus;
        const auto n = 2 + gen.below(6);
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<std::string> tokens;
            const auto len = 1 + gen.below(6);
            for (std::size_t i = 0; i < len; ++i) tokens.push_back("t" + std::to_string(gen.below(7)));
            corpus.push_back(doc(d, tokens));
        }
        // Duplicate one document: df of its terms rises, N rises.
        corpus.push_back(doc(corpus.size(), corpus[gen.below(corpus.size())].tokens));

        const auto m = tfidf_matrix(corpus);
        const Eigen::MatrixXd dense(m.weights);
        const double big_n = static_cast<double>(corpus.size());
        std::map<std::string, double> df;
        for (const auto& s : corpus)
            for (const auto& t : std::set<std::string>(s.tokens.begin(), s.tokens.end())) df[t] += 1;
        std::size_t row = 0;
        for (const auto& [term, f] : df) {
            const double idf = std::log(big_n / f);
            if (idf <= 0) continue;
            ASSERT_EQ(m.terms[row], term);
            for (std::size_t c = 0; c < corpus.size(); ++c) {
                const double tf = static_cast<double>(std::count(corpus[c].tokens.begin(), corpus[c].tokens.end(), term));
                EXPECT_NEAR(dense(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)), tf * idf, 1e-12);
            }
            ++row;
        }
        EXPECT_EQ(row, m.terms.size());
        for (Eigen::Index r = 0; r < dense.rows(); ++r) EXPECT_GT(dense.row(r).cwiseAbs().sum(), 0.0);
        EXPECT_GE(dense.minCoeff(), 0.0);
    }
}

TEST(Nbow, WeightLookupHelper) { EXPECT_DOUBLE_EQ(weight_of(nbow({"q", "r", "r", "r"}), "r"), 0.75); }

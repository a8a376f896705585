#include <gtest/gtest.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semsearch/eval/harness.hpp"
#include "support/synthetic.hpp"

using namespace semsearch;
using eval::hits_at;

namespace {

const std::filesystem::path tmp_dir = SEMSEARCH_TEST_TMP;

std::vector<std::optional<std::size_t>> ranks_with(std::size_t hits, std::size_t total) {
    std::vector<std::optional<std::size_t>> r(total);
    for (std::size_t i = 0; i < hits; ++i) r[i] = 1;
    return r;
}

std::vector<statement> small_corpus() {
    return ingest_corpus("Michael Brown is the Chief Executive Officer.\nRevenue grew.\nRevenue grew.\n",
                         stopword_set{"is", "the"});
}

}  // namespace

TEST(HitsAt, PublishedArithmetic) {
    EXPECT_EQ(hits_at(ranks_with(53, 59), 1).str(), "53 (89.83%)");
    EXPECT_DOUBLE_EQ(hits_at(ranks_with(40, 59), 20).percentage(), 67.8);
    EXPECT_EQ(hits_at(ranks_with(40, 59), 20).str(), "40 (67.80%)");
    EXPECT_DOUBLE_EQ(hits_at(ranks_with(58, 59), 3).percentage(), 98.31);
    EXPECT_DOUBLE_EQ(hits_at(ranks_with(5, 59), 1).percentage(), 8.47);
    EXPECT_EQ(hits_at(ranks_with(0, 7), 1).str(), "0 (0.00%)");
    EXPECT_EQ(hits_at(ranks_with(3, 3), 1).str(), "3 (100.00%)");
    // The two inconsistent published rows are recomputed from counts.
    EXPECT_EQ(hits_at(ranks_with(18, 59), 1).str(), "18 (30.51%)");
    EXPECT_EQ(hits_at(ranks_with(2, 59), 1).str(), "2 (3.39%)");
}

TEST(HitsAt, HalfUpRoundingAgainstExactFractions) {
    // Oracle: compare 100*c/t against each candidate in exact integer terms.
    for (std::size_t total = 1; total <= 200; ++total) {
        for (std::size_t count = 0; count <= total; ++count) {
            const auto h = eval::make_hit_count(count, total).hundredths;
            // h - 1/2 <= 10000 c / t < h + 1/2
            EXPECT_LE(2 * h * total, 20000 * count + total);
            EXPECT_LT(20000 * count, (2 * h + 1) * total);
        }
    }
}

TEST(HitsAt, CutoffsAndErrors) {
    const std::vector<std::optional<std::size_t>> ranks{1, 2, 3, 4, 20, 21, std::nullopt};
    EXPECT_EQ(hits_at(ranks, 1).count, 1u);
    EXPECT_EQ(hits_at(ranks, 2).count, 2u);
    EXPECT_EQ(hits_at(ranks, 3).count, 3u);
    EXPECT_EQ(hits_at(ranks, 20).count, 5u);
    EXPECT_THROW(hits_at({}, 1), error);
    EXPECT_THROW(hits_at(ranks, 0), error);
}

TEST(Trials, ParsesExampleBlock) {
    const auto records = eval::parse_trials(R"(# Example 1
trial 1
target Michael Brown is the Chief Executive Officer.
query Michael Brown is the Chief Executive Officer.
query Who is the CEO?
query Who runs the company?
query Michael Brown
query chief executive
)");
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].queries.size(), 5u);
    const auto set = eval::resolve_trials(records, small_corpus());
    EXPECT_EQ(set.trials[0].target, 0u);
    EXPECT_EQ(set.query_count(), 5u);
}

TEST(Trials, TwelveTrialsFiftyNineQueries) {
    std::string text;
    std::size_t total = 0;
    for (int t = 1; t <= 12; ++t) {
        text += "trial " + std::to_string(t) + "\ntarget #1\n";
        const int n = t <= 11 ? 5 : 4;
        for (int q = 0; q < n; ++q, ++total) text += "query revenue grew " + std::to_string(q) + "\n";
    }
    ASSERT_EQ(total, 59u);
    const auto set = eval::resolve_trials(eval::parse_trials(text), small_corpus());
    EXPECT_EQ(set.trials.size(), 12u);
    EXPECT_EQ(set.query_count(), 59u);
}

TEST(Trials, TargetResolution) {
    const auto corpus = small_corpus();
    // Duplicate statements: the lowest id wins.
    auto set = eval::resolve_trials(eval::parse_trials("trial a\ntarget Revenue grew.\nquery x\n"), corpus);
    EXPECT_EQ(set.trials[0].target, 1u);
    set = eval::resolve_trials(eval::parse_trials("trial a\ntarget #2\nquery x\n"), corpus);
    EXPECT_EQ(set.trials[0].target, 2u);

    try {
        eval::resolve_trials(eval::parse_trials("trial missing-one\ntarget Nothing like it.\nquery x\n"), corpus);
        FAIL();
    } catch (const error& e) {
        EXPECT_NE(std::string(e.what()).find("missing-one"), std::string::npos);
    }
    EXPECT_THROW(eval::resolve_trials(eval::parse_trials("trial a\ntarget #9\nquery x\n"), corpus), error);
}

TEST(Trials, MalformedFiles) {
    EXPECT_THROW(eval::parse_trials(""), format_error);
    EXPECT_THROW(eval::parse_trials("trial a\ntarget #1\n"), format_error);
    EXPECT_THROW(eval::parse_trials("trial a\nquery q\n"), format_error);
    EXPECT_THROW(eval::parse_trials("query q\n"), format_error);
    EXPECT_THROW(eval::parse_trials("trial a\ntarget #1\ntarget #2\nquery q\n"), format_error);
    EXPECT_THROW(eval::parse_trials("trial a\ntarget #1\nquery q\ntrial a\ntarget #1\nquery q\n"), format_error);
    EXPECT_THROW(eval::parse_trials("trial a\nbogus line\n"), format_error);
}

TEST(Evaluate, HandScriptedRanksTable) {
    // Ranks 1, 2, 3, 15, miss for one backend.
    eval::backend_report r;
    r.backend = "fixture";
    for (std::optional<std::size_t> rank : {std::optional<std::size_t>{1}, {2}, {3}, {15}, {}}) {
        eval::query_outcome o;
        o.trial_id = "t";
        o.rank = rank;
        r.outcomes.push_back(o);
    }
    EXPECT_EQ(eval::format_csv({r}), "backend,hits@1,hits@2,hits@3,hits@20\n"
                                     "fixture,1 (20.00%),2 (40.00%),3 (60.00%),4 (80.00%)\n");
    const auto table = eval::format_table({r});
    EXPECT_NE(table.find("fixture  1 (20.00%)"), std::string::npos);
    EXPECT_NE(table.find("queries: 5"), std::string::npos);
    const auto ranks = eval::format_ranks_csv({r});
    EXPECT_NE(ranks.find("fixture,t,0,0,miss,0,"), std::string::npos);
}

TEST(Evaluate, SyntheticCorpusVerbatimQueriesRankFirst) {
    const auto run = fixture::make_synthetic_run(tmp_dir / "eval_synthetic");
    const auto stops = load_stopwords(run.stopwords);
    const auto corpus = ingest_corpus(read_file(run.corpus), stops);
    ASSERT_EQ(corpus.size(), 50u);
    const auto trials = eval::load_trials(run.trials, corpus);
    ASSERT_EQ(trials.query_count(), 30u);

    std::vector<retrieval::backend_spec> specs(4);
    specs[0].kind = retrieval::backend_kind::wmd;
    specs[0].embedding_path = run.vectors;
    specs[1] = specs[0];
    specs[1].kind = retrieval::backend_kind::wmd_pruned;
    specs[2] = specs[0];
    specs[2].kind = retrieval::backend_kind::lsa;
    specs[2].lsa_dim = 20;
    specs[3] = specs[0];
    specs[3].name = "broken";
    specs[3].embedding_path = (tmp_dir / "nope.vec").string();

    const auto reports = eval::evaluate(corpus, stops, trials, specs, {.k = 20, .jobs = 3});
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : {reports[0], reports[1]}) {
        for (const auto& o : r.outcomes) {
            if (o.query_number == 1) {
                EXPECT_EQ(o.rank, std::optional<std::size_t>{1}) << o.trial_id;
            }
        }
        EXPECT_EQ(r.hits(20).hundredths, 10000u);
        for (std::size_t i = 1; i < std::size(eval::report_cutoffs); ++i)
            EXPECT_LE(r.hits(eval::report_cutoffs[i - 1]).count, r.hits(eval::report_cutoffs[i]).count);
    }
    EXPECT_EQ(reports[0].ranks(), reports[1].ranks());
    EXPECT_FALSE(reports[3].error.empty());
    EXPECT_EQ(reports[3].hits(20).count, 0u);

    // Thread count does not change the outcome.
    const auto serial = eval::evaluate(corpus, stops, trials, specs, {.k = 20, .jobs = 1});
    EXPECT_EQ(eval::format_ranks_csv(serial), eval::format_ranks_csv(reports));
    EXPECT_EQ(eval::format_table(serial), eval::format_table(reports));

    eval::write_reports(tmp_dir / "eval_synthetic" / "out", serial);
    for (const char* f : {"report.csv", "report.txt", "ranks.csv"})
        EXPECT_TRUE(std::filesystem::exists(tmp_dir / "eval_synthetic" / "out" / f));
}

TEST(Evaluate, SingleMissedQuery) {
    const auto corpus = small_corpus();
    const auto trials = eval::resolve_trials(eval::parse_trials("trial a\ntarget #0\nquery revenue grew\n"), corpus);
    retrieval::backend_spec spec;
    spec.kind = retrieval::backend_kind::lsa;
    spec.lsa_dim = 2;
    const auto reports = eval::evaluate(corpus, {"is", "the"}, trials, {spec}, {.k = 1});
    for (auto k : eval::report_cutoffs) EXPECT_EQ(reports[0].hits(k).str(), "0 (0.00%)");
}

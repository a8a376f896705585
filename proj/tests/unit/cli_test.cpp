#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "semsearch/cli/app.hpp"
#include "support/synthetic.hpp"

using namespace semsearch;

namespace {

const std::filesystem::path tmp_dir = SEMSEARCH_TEST_TMP;

struct result {
    int code;
    std::string out;
    std::string err;
};

result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const fixture::synthetic_run& synthetic() {
    static const auto r = fixture::make_synthetic_run(tmp_dir / "cli_synthetic");
    return r;
}

std::string path(const std::string& name) { return (tmp_dir / "cli_synthetic" / name).string(); }

}  // namespace

TEST(Cli, IndexThenSearchFindsVerbatimStatement) {
    const auto& s = synthetic();
    auto r = run({"index", "--corpus", s.corpus, "--backend", "wmd", "--embeddings", s.vectors, "--stoplist",
                  s.stopwords, "--out", path("wmd.idx")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("statements: 50"), std::string::npos);

    const auto corpus = ingest_corpus(read_file(s.corpus), load_stopwords(s.stopwords));
    r = run({"search", "--index", path("wmd.idx"), corpus[17].raw, "-k", "3", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("rank,id,score,text\n1,17,", 0), 0u) << r.out;

    r = run({"search", "--index", path("wmd.idx"), "the of and"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("semsearch: "), std::string::npos);
}

TEST(Cli, EvalIsByteIdenticalAcrossRuns) {
    const auto& s = synthetic();
    auto eval = [&](const std::string& out) {
        return run({"eval", "--corpus", s.corpus, "--trials", s.trials, "--backend", "wmd,wcd,lsa", "--embeddings",
                    s.vectors, "--lsa-dim", "20", "--stoplist", s.stopwords, "--jobs", "1", "--out", out});
    };
    const auto a = eval(path("eval_a"));
    const auto b = eval(path("eval_b"));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("queries: 30"), std::string::npos);
    for (const char* f : {"report.csv", "report.txt", "ranks.csv"}) {
        const auto x = read_file((std::filesystem::path(path("eval_a")) / f).string());
        EXPECT_FALSE(x.empty());
        EXPECT_EQ(x, read_file((std::filesystem::path(path("eval_b")) / f).string())) << f;
    }
    const auto csv = read_file((std::filesystem::path(path("eval_a")) / "report.csv").string());
    EXPECT_EQ(csv.rfind("backend,hits@1,hits@2,hits@3,hits@20\n", 0), 0u);
    EXPECT_NE(csv.find("\nwmd,"), std::string::npos);
}

TEST(Cli, ParseErrorsAreNonZero) {
    EXPECT_NE(run({}).code, 0);
    EXPECT_NE(run({"frobnicate"}).code, 0);
    EXPECT_NE(run({"index", "--corpus", synthetic().corpus, "--out", path("x"), "--bogus"}).code, 0);
    EXPECT_NE(run({"search", "--index", path("does-not-exist"), "q"}).code, 0);
    const auto r = run({"index", "--corpus", synthetic().corpus, "--out", path("x"), "--backend", "nope"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("nope"), std::string::npos);
}

TEST(Cli, HelpForEverySubcommand) {
    for (std::vector<std::string> args : std::vector<std::vector<std::string>>{{"--help"},
                                                                               {"index", "--help"},
                                                                               {"search", "--help"},
                                                                               {"eval", "--help"},
                                                                               {"train-pv", "--help"},
                                                                               {"embeddings", "inspect", "--help"},
                                                                               {"embeddings", "filter", "--help"}}) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 0) << args.front();
        EXPECT_NE(r.out.find("Usage:"), std::string::npos) << args.front();
    }
}

TEST(Cli, ConfigFileWithCommandLineOverride) {
    const auto& s = synthetic();
    fixture::write_file(path("run.cfg"),
                        "# lsa run\nbackend = lsa\nlsa-dim = 4\n\nstoplist = \"" + s.stopwords + "\"\n");
    auto r = run({"index", "--config", path("run.cfg"), "--corpus", s.corpus, "--out", path("lsa.idx")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("backend: lsa"), std::string::npos);
    EXPECT_NE(r.out.find("lsa dim: 4"), std::string::npos);

    r = run({"index", "--config", path("run.cfg"), "--lsa-dim", "3", "--corpus", s.corpus, "--out", path("lsa.idx")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("lsa dim: 3"), std::string::npos);
    r = run({"index", "--lsa-dim=2", "--config=" + path("run.cfg"), "--corpus", s.corpus, "--out", path("lsa.idx")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("lsa dim: 2"), std::string::npos);

    // Short options by single-letter key.
    fixture::write_file(path("search.cfg"), "k = 2\nformat = csv\n");
    r = run({"search", "--config", path("search.cfg"), "--index", path("lsa.idx"), "w1 w2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);

    fixture::write_file(path("bad.cfg"), "lsa-dimension = 4\n");
    r = run({"index", "--config", path("bad.cfg"), "--corpus", s.corpus, "--out", path("lsa.idx")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unknown key 'lsa-dimension'"), std::string::npos) << r.err;
    fixture::write_file(path("bad.cfg"), "backend lsa\n");
    EXPECT_EQ(run({"index", "--config", path("bad.cfg"), "--corpus", s.corpus, "--out", path("lsa.idx")}).code, 1);
    // A key that belongs to another subcommand.
    fixture::write_file(path("bad.cfg"), "jobs = 2\n");
    EXPECT_EQ(run({"index", "--config", path("bad.cfg"), "--corpus", s.corpus, "--out", path("lsa.idx")}).code, 1);
}

TEST(Cli, TrainPv) {
    const auto& s = synthetic();
    const auto r = run({"train-pv", "--corpus", s.corpus, "--stoplist", s.stopwords, "--mode", "pv_dm_plus_dbow",
                        "--pv-dim", "6", "--pv-epochs", "3", "--out", path("pv.bin")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("paragraphs: 50"), std::string::npos);
    EXPECT_NE(r.out.find("dim: 12"), std::string::npos);
    std::ifstream in(path("pv.bin"), std::ios::binary);
    const auto m = pv::model::load(in);
    EXPECT_EQ(m.doc_ids().size(), 50u);
    EXPECT_NE(run({"train-pv", "--corpus", s.corpus, "--mode", "pv_bogus", "--out", path("pv.bin")}).code, 0);
}

TEST(Cli, EmbeddingsInspectAndFilter) {
    const auto& s = synthetic();
    auto r = run({"embeddings", "inspect", s.vectors, "--show", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("count: 80\ndim: 8\n"), std::string::npos) << r.out;

    // A corpus mentioning two known words and one unknown one.
    fixture::write_file(path("small.txt"), "w1 w2 zzz\n");
    r = run({"embeddings", "filter", s.vectors, "--corpus", path("small.txt"), "--stoplist", s.stopwords,
             "--output-format", "word2vec", "--out", path("small.bin")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("kept: 2 of 3"), std::string::npos) << r.out;
    const auto t = load_embeddings(path("small.bin"), embedding_format::word2vec_binary);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.dim(), 8u);

    fixture::write_file(path("vocab.txt"), "w5\n\nw7\nnot-there\n");
    r = run({"embeddings", "filter", s.vectors, "--vocab", path("vocab.txt"), "--output-format", "text", "--out",
             path("vocab.txt.out")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("kept: 2 of 3"), std::string::npos) << r.out;
    const auto v = load_embeddings(path("vocab.txt.out"), embedding_format::text);
    EXPECT_EQ(v.tokens(), (std::vector<std::string>{"w5", "w7"}));
    EXPECT_EQ(run({"embeddings", "filter", s.vectors, "--out", path("none.vec")}).code, 1);
}

TEST(Cli, StoplistEnvironmentOverride) {
    fixture::write_file(path("env_stop.txt"), "w1\n");
    ::setenv(cli::stoplist_env, path("env_stop.txt").c_str(), 1);
    EXPECT_EQ(cli::default_stoplist(), path("env_stop.txt"));
    ::unsetenv(cli::stoplist_env);
    EXPECT_EQ(cli::default_stoplist(), SEMSEARCH_DEFAULT_STOPLIST);
}

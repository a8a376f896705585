#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "semsearch/common/random.hpp"
#include "semsearch/text/pipeline.hpp"

using namespace semsearch;

namespace {

stopword_set shipped_stopwords() { return load_stopwords(SEMSEARCH_DEFAULT_STOPLIST); }

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

}  // namespace

TEST(NormalizeText, LowercasesCasedLetters) {
    EXPECT_EQ(normalize_text("Chief Executive Officer"), "chief executive officer");
    EXPECT_EQ(normalize_text(""), "");
    EXPECT_EQ(normalize_text("£31.4 million"), "£31.4 million");
}

TEST(NormalizeText, HandlesNonAsciiLetters) {
    EXPECT_EQ(normalize_text("ÉCOLE Ÿ ΣΑΣ ПРИВЕТ"), "école ÿ σασ привет");
    // Invalid UTF-8 bytes pass through untouched.
    const std::string broken = std::string("A\xff") + "B";
    EXPECT_EQ(normalize_text(broken), std::string("a\xff") + "b");
}

TEST(SegmentParagraphs, SplitsOnNewlines) {
    const auto two = segment_paragraphs("A.\n\nB.");
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0].raw, "A.");
    EXPECT_EQ(two[1].raw, "B.");
    EXPECT_EQ(two[0].id, 0u);
    EXPECT_EQ(two[1].id, 1u);

    EXPECT_EQ(segment_paragraphs("A.\n\n\n\nB.").size(), 2u);
    EXPECT_EQ(segment_paragraphs("A.\nB.").size(), 2u);
    EXPECT_TRUE(segment_paragraphs("  \n\t\n").empty());
    EXPECT_EQ(segment_paragraphs("A.\r\n\r\nB.")[0].raw, "A.");
}

TEST(SegmentParagraphs, BlankLineModeKeepsWrappedLines) {
    const auto paras = segment_paragraphs("line one\nline two\n \nnext para\n", paragraph_delimiter::blank_line);
    ASSERT_EQ(paras.size(), 2u);
    EXPECT_EQ(paras[0].raw, "line one\nline two");
    EXPECT_EQ(paras[1].raw, "next para");
}

TEST(SegmentParagraphs, LosesNoNonWhitespace) {
    rng gen(7);
    const std::string alphabet = "ab .,\n\n  \t£x";
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        const auto len = gen.below(60);
        for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[gen.below(alphabet.size())]);
        for (auto mode : {paragraph_delimiter::newline, paragraph_delimiter::blank_line}) {
            std::string joined;
            for (const auto& s : segment_paragraphs(text, mode)) joined += s.raw + "\n";
            auto strip = [](const std::string& s) {
                std::string out;
                for (char c : s)
                    if (c != ' ' && c != '\n' && c != '\t' && c != '\r') out.push_back(c);
                return out;
            };
            EXPECT_EQ(strip(joined), strip(text));
        }
    }
}

TEST(Tokenize, DropsStopWordsAndEdgePunctuation) {
    const stopword_set stops{"is", "the", "of"};
    EXPECT_EQ(tokenize("michael brown is the chief executive officer of the company.", stops),
              (std::vector<std::string>{"michael", "brown", "chief", "executive", "officer", "company"}));
    EXPECT_TRUE(tokenize("", stops).empty());
    EXPECT_TRUE(tokenize("the the the", stopword_set{"the"}).empty());
}

TEST(Tokenize, ShippedStoplistOnExampleStatement) {
    const auto stops = shipped_stopwords();
    EXPECT_EQ(tokenize("Michael Brown is the Chief Executive Officer of the Company.", stops),
              (std::vector<std::string>{"michael", "brown", "chief", "executive", "officer", "company"}));
}

TEST(Tokenize, KeepsFinancialTokens) {
    const stopword_set none;
    EXPECT_EQ(tokenize("Profit rose by £31.4 million (30.5%), to $2,000.", none),
              (std::vector<std::string>{"profit", "rose", "by", "£31.4", "million", "30.5", "to", "$2,000"}));
    EXPECT_EQ(tokenize("“quoted” — dash", none), (std::vector<std::string>{"quoted", "dash"}));
    EXPECT_EQ(tokenize("...", none), std::vector<std::string>{});
    EXPECT_EQ(tokenize("don't co-operate", none), (std::vector<std::string>{"don't", "co-operate"}));
}

TEST(Tokenize, NoStemming) {
    EXPECT_EQ(tokenize("decreased increases", stopword_set{}),
              (std::vector<std::string>{"decreased", "increases"}));
}

TEST(Tokenize, PropertiesOnRandomText) {
    const auto stops = shipped_stopwords();
    const std::vector<std::string> pieces{"The", "of", "Company", "'s", "(", ")", ".", ",", "£3.9", "Million", "ÉTÉ",
                                          " ", " ", "\n", "“", "”", "is", "Brown", "30%", "-", "a"};
    rng gen(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const auto len = gen.below(25);
        for (std::size_t i = 0; i < len; ++i) text += pieces[gen.below(pieces.size())];
        const auto tokens = tokenize(text, stops);
        for (const auto& t : tokens) {
            EXPECT_FALSE(stops.contains(t)) << t;
            EXPECT_EQ(normalize_text(t), t);
            EXPECT_FALSE(t.empty());
        }
        EXPECT_EQ(tokenize(join(tokens), stops), tokens) << text;
    }
}

TEST(Stopwords, ParsesCommentsAndCase) {
    const auto set = parse_stopwords("# header\nThe\n  of  \n\nand # trailing comment\n");
    EXPECT_EQ(set.size(), 3u);
    EXPECT_TRUE(set.contains("the"));
    EXPECT_TRUE(set.contains("of"));
    EXPECT_TRUE(set.contains("and"));
    EXPECT_FALSE(set.contains("The"));
}

TEST(Stopwords, ShippedListIsLowercase) {
    const auto stops = shipped_stopwords();
    EXPECT_GT(stops.size(), 100u);
    EXPECT_TRUE(stops.contains("the"));
    EXPECT_FALSE(stops.contains("company"));
}

TEST(IngestCorpus, StatementsCanBeEmpty) {
    const auto stops = shipped_stopwords();
    const auto corpus = ingest_corpus("Revenue grew.\nThe of and.\nProfit fell.", stops);
    ASSERT_EQ(corpus.size(), 3u);
    EXPECT_TRUE(corpus[1].tokens.empty());
    EXPECT_EQ(corpus[2].tokens, (std::vector<std::string>{"profit", "fell"}));
}

#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "semsearch/embedding/io.hpp"
#include "semsearch/eval/harness.hpp"
#include "semsearch/eval/trials.hpp"
#include "semsearch/pv/model.hpp"
#include "semsearch/retrieval/engine.hpp"
#include "semsearch/text/pipeline.hpp"
#include "semsearch/text/unicode.hpp"

#ifndef SEMSEARCH_DEFAULT_STOPLIST
#define SEMSEARCH_DEFAULT_STOPLIST "data/stopwords_en.txt"
#endif

namespace semsearch::cli {

/// Environment variable that replaces the compiled-in stoplist path.
inline constexpr const char* stoplist_env = "SEMSEARCH_STOPLIST";

inline std::string default_stoplist() {
    if (const char* env = std::getenv(stoplist_env); env != nullptr && *env != '\0') return env;
    return SEMSEARCH_DEFAULT_STOPLIST;
}

namespace detail {

struct text_options {
    std::string stoplist = default_stoplist();
    std::string delimiter = "newline";

    stopword_set stops() const { return load_stopwords(stoplist); }

    paragraph_delimiter paragraphs() const {
        if (delimiter == "newline") return paragraph_delimiter::newline;
        if (delimiter == "blank") return paragraph_delimiter::blank_line;
        throw config_error("unknown paragraph delimiter '" + delimiter + "' (newline|blank)");
    }

    std::vector<statement> corpus(const std::string& path, const stopword_set& stops) const {
        auto c = ingest_corpus(read_file(path), stops, paragraphs());
        if (c.empty()) throw empty_document_error("corpus " + path + " has no statements");
        return c;
    }
};

struct backend_options {
    std::string embeddings;
    std::string embedding_format = "auto";
    std::string ngrams;
    bool skip_malformed = false;
    std::string metric = "cosine";
    std::size_t prefetch = 0;
    std::size_t lsa_dim = 300;
    std::string pv_query = "inference";
    std::size_t pv_infer_steps = 0;
    pv::config pv;

    /// `item` is "kind" or "kind@embedding-path".
    retrieval::backend_spec spec(const std::string& item, std::uint64_t seed) const {
        retrieval::backend_spec s;
        const auto at = item.find('@');
        s.kind = retrieval::parse_backend_kind(item.substr(0, at));
        s.embedding_path = embeddings;
        if (at != std::string::npos) {
            s.embedding_path = item.substr(at + 1);
            s.name = item.substr(0, at) + ":" + std::filesystem::path(s.embedding_path).stem().string();
        }
        s.format = parse_embedding_format(embedding_format);
        s.ngram_path = ngrams;
        s.skip_malformed_rows = skip_malformed;
        s.metric = parse_ground_metric(metric);
        s.prefetch = prefetch;
        s.lsa_dim = lsa_dim;
        if (pv_query == "inference") {
            s.pv_query = pv::query_representation::inference;
        } else if (pv_query == "centroid") {
            s.pv_query = pv::query_representation::centroid;
        } else {
            throw config_error("unknown pv query representation '" + pv_query + "' (inference|centroid)");
        }
        s.pv_infer_steps = pv_infer_steps;
        s.pv = pv;
        s.seed = seed;
        s.validate();
        return s;
    }
};

inline void add_text_options(CLI::App* app, text_options& t) {
    app->add_option("--stoplist", t.stoplist, "Stop-word file, one word per line")->capture_default_str();
    app->add_option("--delimiter", t.delimiter, "Paragraph boundary: newline|blank")->capture_default_str();
}

inline void add_pv_options(CLI::App* app, pv::config& pv) {
    app->add_option("--pv-dim", pv.dim, "Paragraph vector dimension")->capture_default_str();
    app->add_option("--pv-window", pv.window, "PV-DM context radius")->capture_default_str();
    app->add_option("--pv-negative", pv.negative, "Negative samples per word")->capture_default_str();
    app->add_option("--pv-epochs", pv.epochs, "Training epochs")->capture_default_str();
    app->add_option("--pv-lr-start", pv.lr_start, "Initial learning rate")->capture_default_str();
    app->add_option("--pv-lr-end", pv.lr_end, "Final learning rate")->capture_default_str();
    app->add_option("--pv-min-count", pv.min_count, "Minimum word count")->capture_default_str();
}

inline void add_backend_options(CLI::App* app, backend_options& b) {
    app->add_option("--embeddings", b.embeddings, "Word-vector file for wcd/wmd backends");
    app->add_option("--embedding-format", b.embedding_format, "auto|word2vec|text|vec")->capture_default_str();
    app->add_option("--ngrams", b.ngrams, "Subword n-gram vectors for unknown words");
    app->add_flag("--skip-malformed", b.skip_malformed, "Skip text rows with the wrong field count");
    app->add_option("--metric", b.metric, "Ground metric: cosine|euclidean")->capture_default_str();
    app->add_option("--prefetch", b.prefetch, "Exact solves before pruning (wmd_pruned); 0 = 2k");
    app->add_option("--lsa-dim", b.lsa_dim, "LSA dimension")->capture_default_str();
    app->add_option("--pv-query", b.pv_query, "Query vector: inference|centroid")->capture_default_str();
    app->add_option("--pv-infer-steps", b.pv_infer_steps, "Inference passes; 0 = training epochs");
    add_pv_options(app, b.pv);
}

/// The file itself is read by expand_config before parsing; the option only
/// documents it and accepts the path.
inline void add_config(CLI::App* sub, std::string& path) {
    sub->add_option("--config", path, "Flat key=value file of this command's long options; flags win");
}

/// `key = value` lines; blank lines and '#' comments are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto trim = [](std::string_view v) { return std::string(unicode::trim_space(v)); };
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw config_error(path + ":" + std::to_string(n) + ": expected key = value");
        auto key = trim(std::string_view(text).substr(0, eq));
        auto value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) throw config_error(path + ":" + std::to_string(n) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

/// Rewrites `--config FILE` into flags placed right after the subcommand
/// path. Keys already given on the command line are skipped so flags take
/// precedence; keys naming no option of the subcommand are rejected.
inline std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
    CLI::App* cmd = &app;
    std::size_t at = 0;
    while (at < args.size()) {
        auto* sub = cmd->get_subcommand_no_throw(args[at]);
        if (sub == nullptr) break;
        cmd = sub;
        ++at;
    }
    std::string path;
    for (std::size_t i = at; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || cmd == &app) return args;

    std::vector<std::string> flags;
    for (const auto& [key, value] : read_config(path)) {
        const std::string name = (key.size() == 1 ? "-" : "--") + key;
        if (key == "config" || cmd->get_option_no_throw(name) == nullptr)
            throw config_error(path + ": unknown key '" + key + "' for " + cmd->get_name());
        const bool given = std::any_of(args.begin() + static_cast<std::ptrdiff_t>(at), args.end(),
                                       [&](const std::string& a) { return a == name || a.rfind(name + "=", 0) == 0; });
        if (given) continue;
        if (key.size() == 1) {
            flags.push_back(name);
            flags.push_back(value);
        } else {
            flags.push_back(name + "=" + value);
        }
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), flags.begin(), flags.end());
    return args;
}

inline std::string fixed(double x, int digits = 6) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write " + path);
    out << text;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write " + path);
    return out;
}

inline void check_format(const std::string& f) {
    if (f != "csv" && f != "table") throw config_error("unknown --format '" + f + "' (csv|table)");
}

}  // namespace detail

/// Runs the command line; returns the process exit code. Output goes to
/// `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Semantic statement retrieval over LSA, word-embedding transport distances and paragraph vectors",
                 "semsearch"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "semsearch 1.0.0");

    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string format = "table";
    std::string config_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
        detail::add_config(sub, config_path);
    };

    // index
    auto* index_cmd = app.add_subcommand("index", "Build and save a search index");
    detail::text_options index_text;
    detail::backend_options index_backend;
    std::string index_corpus, index_backend_kind = "wmd", index_out;
    index_cmd->add_option("--corpus", index_corpus, "Corpus text file")->required()->check(CLI::ExistingFile);
    index_cmd->add_option("--backend", index_backend_kind,
                          "lsa|wcd|wmd|wmd_pruned|pv_dm|pv_dbow|pv_dm_plus_dbow")->capture_default_str();
    index_cmd->add_option("--out", index_out, "Index file to write")->required();
    detail::add_text_options(index_cmd, index_text);
    detail::add_backend_options(index_cmd, index_backend);
    add_common(index_cmd);

    // search
    auto* search_cmd = app.add_subcommand("search", "Rank indexed statements against a query");
    std::string search_index, search_query;
    std::size_t search_k = 20;
    search_cmd->add_option("--index", search_index, "Index file")->required()->check(CLI::ExistingFile);
    search_cmd->add_option("query", search_query, "Query text")->required();
    search_cmd->add_option("-k", search_k, "Results to print")->capture_default_str();
    search_cmd->add_option("--format", format, "csv|table")->capture_default_str();
    detail::add_config(search_cmd, config_path);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run trials against backends and write hits@k reports");
    detail::text_options eval_text;
    detail::backend_options eval_backend;
    std::string eval_corpus, eval_trials, eval_out = "eval-report";
    std::vector<std::string> eval_backends{"wmd"};
    std::size_t eval_k = 20;
    eval_cmd->add_option("--corpus", eval_corpus, "Corpus text file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--trials", eval_trials, "Trials file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--backend", eval_backends, "Backends, each kind or kind@embedding-file")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("-k", eval_k, "Ranks examined per query")->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "Report directory")->capture_default_str();
    eval_cmd->add_option("--jobs", jobs, "Worker threads; 1 is fully reproducible")->capture_default_str();
    eval_cmd->add_option("--format", format, "Printed table: csv|table")->capture_default_str();
    detail::add_text_options(eval_cmd, eval_text);
    detail::add_backend_options(eval_cmd, eval_backend);
    add_common(eval_cmd);

    // train-pv
    auto* train_cmd = app.add_subcommand("train-pv", "Train paragraph vectors and save the model");
    detail::text_options train_text;
    pv::config train_cfg;
    std::string train_corpus, train_mode = "pv_dm", train_out;
    train_cmd->add_option("--corpus", train_corpus, "Corpus text file")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--mode", train_mode, "pv_dm|pv_dbow|pv_dm_plus_dbow")->capture_default_str();
    train_cmd->add_option("--out", train_out, "Model file to write")->required();
    detail::add_text_options(train_cmd, train_text);
    detail::add_pv_options(train_cmd, train_cfg);
    add_common(train_cmd);

    // embeddings inspect | filter
    auto* emb_cmd = app.add_subcommand("embeddings", "Inspect or filter word-vector files");
    emb_cmd->require_subcommand(1);
    auto* inspect_cmd = emb_cmd->add_subcommand("inspect", "Print count, dimension and duplicates");
    std::string emb_input, emb_format = "auto";
    std::size_t inspect_show = 5;
    inspect_cmd->add_option("input", emb_input, "Vector file")->required()->check(CLI::ExistingFile);
    inspect_cmd->add_option("--embedding-format", emb_format, "auto|word2vec|text|vec")->capture_default_str();
    inspect_cmd->add_option("--show", inspect_show, "Tokens to list")->capture_default_str();
    detail::add_config(inspect_cmd, config_path);

    auto* filter_cmd = emb_cmd->add_subcommand("filter", "Keep only the rows a corpus needs");
    detail::text_options filter_text;
    std::string filter_corpus, filter_trials, filter_vocab, filter_out, filter_out_format = "vec";
    filter_cmd->add_option("input", emb_input, "Vector file")->required()->check(CLI::ExistingFile);
    filter_cmd->add_option("--embedding-format", emb_format, "auto|word2vec|text|vec")->capture_default_str();
    filter_cmd->add_option("--vocab", filter_vocab, "Tokens to keep, one per line")->check(CLI::ExistingFile);
    filter_cmd->add_option("--corpus", filter_corpus, "Also keep this corpus's tokens")->check(CLI::ExistingFile);
    filter_cmd->add_option("--trials", filter_trials, "Also keep the tokens of these trial queries")
        ->check(CLI::ExistingFile);
    filter_cmd->add_option("--out", filter_out, "File to write")->required();
    filter_cmd->add_option("--output-format", filter_out_format, "text|vec|word2vec")->capture_default_str();
    detail::add_text_options(filter_cmd, filter_text);
    detail::add_config(filter_cmd, config_path);

    try {
        auto args = detail::expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const std::exception& e) {
        err << "semsearch: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*index_cmd) {
            const auto stops = index_text.stops();
            auto corpus = index_text.corpus(index_corpus, stops);
            const auto spec = index_backend.spec(index_backend_kind, seed);
            const auto ix = retrieval::index::build(std::move(corpus), stops, spec);
            auto file = detail::open_out(index_out);
            ix.save(file);
            if (!file) throw error("failed writing " + index_out);
            out << "backend: " << spec.label() << "\nstatements: " << ix.statements().size()
                << "\nrankable: " << ix.rankable() << '\n';
            if (ix.vectors()) out << "vocabulary: " << ix.vectors()->size() << "\ndim: " << ix.vectors()->dim() << '\n';
            if (ix.lsa_model()) out << "lsa dim: " << ix.lsa_model()->k() << '\n';
            if (ix.pv_model()) out << "pv vocabulary: " << ix.pv_model()->vocabulary().size() << '\n';
            out << "index: " << index_out << '\n';
        } else if (*search_cmd) {
            detail::check_format(format);
            auto file = detail::open_in(search_index);
            const auto ix = retrieval::index::load(file);
            const auto r = ix.rank(search_query, search_k);
            if (format == "csv") {
                out << "rank,id,score,text\n";
                for (std::size_t i = 0; i < r.hits.size(); ++i)
                    out << i + 1 << ',' << r.hits[i].id << ',' << detail::fixed(r.hits[i].score) << ','
                        << eval::detail::csv_field(ix.find_statement(r.hits[i].id)->raw) << '\n';
            } else {
                out << "backend: " << ix.spec().label() << "  dropped query tokens: " << r.dropped_tokens << "\n\n";
                for (std::size_t i = 0; i < r.hits.size(); ++i)
                    out << std::setw(4) << i + 1 << "  #" << std::left << std::setw(6) << r.hits[i].id << std::right
                        << "  " << std::setw(10) << detail::fixed(r.hits[i].score) << "  "
                        << ix.find_statement(r.hits[i].id)->raw << '\n';
            }
        } else if (*eval_cmd) {
            detail::check_format(format);
            if (jobs == 0) throw config_error("--jobs must be at least 1");
            const auto stops = eval_text.stops();
            const auto corpus = eval_text.corpus(eval_corpus, stops);
            const auto trials = eval::load_trials(eval_trials, corpus);
            std::vector<retrieval::backend_spec> specs;
            for (const auto& b : eval_backends) specs.push_back(eval_backend.spec(b, seed));
            const auto reports = eval::evaluate(corpus, stops, trials, specs, {.k = eval_k, .jobs = jobs});
            eval::write_reports(eval_out, reports);
            out << (format == "csv" ? eval::format_csv(reports) : eval::format_table(reports));
        } else if (*train_cmd) {
            const auto stops = train_text.stops();
            const auto corpus = train_text.corpus(train_corpus, stops);
            train_cfg.kind = pv::parse_mode(train_mode);
            train_cfg.seed = seed;
            const auto m = pv::train_pv(corpus, train_cfg);
            auto file = detail::open_out(train_out);
            m.save(file);
            if (!file) throw error("failed writing " + train_out);
            out << "mode: " << pv::to_string(train_cfg.kind) << "\nvocabulary: " << m.vocabulary().size()
                << "\nparagraphs: " << m.doc_ids().size() << "\ndim: " << m.representation_dim()
                << "\nfinal epoch loss: " << detail::fixed(m.epoch_losses().back()) << "\nmodel: " << train_out << '\n';
        } else if (*inspect_cmd) {
            auto fmt = parse_embedding_format(emb_format);
            if (fmt == embedding_format::automatic) fmt = detect_embedding_format(emb_input);
            const auto t = load_embeddings(emb_input, fmt);
            static const char* names[] = {"auto", "word2vec", "text", "vec"};
            out << "format: " << names[static_cast<int>(fmt)] << "\ncount: " << t.size() << "\ndim: " << t.dim()
                << "\nduplicates: " << t.duplicate_tokens().size() << '\n';
            for (std::size_t i = 0; i < std::min(inspect_show, t.size()); ++i) out << "  " << t.token(i) << '\n';
        } else if (*filter_cmd) {
            if (filter_vocab.empty() && filter_corpus.empty() && filter_trials.empty())
                throw config_error("embeddings filter needs --vocab, --corpus or --trials");
            std::unordered_set<std::string> vocab;
            if (!filter_vocab.empty()) {
                std::istringstream in(read_file(filter_vocab));
                for (std::string line; std::getline(in, line);)
                    if (const auto tok = unicode::trim_space(line); !tok.empty()) vocab.emplace(tok);
            }
            const auto stops = filter_corpus.empty() && filter_trials.empty() ? stopword_set{} : filter_text.stops();
            if (!filter_corpus.empty())
                for (const auto& s : filter_text.corpus(filter_corpus, stops)) vocab.insert(s.tokens.begin(), s.tokens.end());
            if (!filter_trials.empty())
                for (const auto& t : eval::parse_trials(read_file(filter_trials)))
                    for (const auto& q : t.queries)
                        for (auto& tok : tokenize(normalize_text(q), stops)) vocab.insert(std::move(tok));
            embedding_load_options opts;
            opts.vocabulary = &vocab;
            const auto t = load_embeddings(emb_input, parse_embedding_format(emb_format), opts);
            auto file = detail::open_out(filter_out);
            if (filter_out_format == "word2vec") {
                write_word2vec_binary(file, t);
            } else if (filter_out_format == "vec" || filter_out_format == "text") {
                write_text_vectors(file, t, filter_out_format == "vec");
            } else {
                throw config_error("unknown --output-format '" + filter_out_format + "' (text|vec|word2vec)");
            }
            if (!file) throw error("failed writing " + filter_out);
            out << "kept: " << t.size() << " of " << vocab.size() << " requested tokens\nout: " << filter_out << '\n';
        }
    } catch (const std::exception& e) {
        err << "semsearch: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<const char*> argv{"semsearch"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace semsearch::cli

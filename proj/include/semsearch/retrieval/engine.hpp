#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semsearch/common/binary_io.hpp"
#include "semsearch/common/errors.hpp"
#include "semsearch/common/ranking.hpp"
#include "semsearch/embedding/io.hpp"
#include "semsearch/embedding/ngram.hpp"
#include "semsearch/lsa/model.hpp"
#include "semsearch/pv/model.hpp"
#include "semsearch/text/pipeline.hpp"
#include "semsearch/transport/topk.hpp"

namespace semsearch::retrieval {

enum class backend_kind { lsa, wcd, wmd, wmd_pruned, pv_dm, pv_dbow, pv_dm_plus_dbow };

inline std::string to_string(backend_kind k) {
    switch (k) {
        case backend_kind::lsa: return "lsa";
        case backend_kind::wcd: return "wcd";
        case backend_kind::wmd: return "wmd";
        case backend_kind::wmd_pruned: return "wmd_pruned";
        case backend_kind::pv_dm: return "pv_dm";
        case backend_kind::pv_dbow: return "pv_dbow";
        case backend_kind::pv_dm_plus_dbow: return "pv_dm_plus_dbow";
    }
    return "?";
}

inline backend_kind parse_backend_kind(std::string_view s) {
    for (auto k : {backend_kind::lsa, backend_kind::wcd, backend_kind::wmd, backend_kind::wmd_pruned,
                   backend_kind::pv_dm, backend_kind::pv_dbow, backend_kind::pv_dm_plus_dbow})
        if (s == to_string(k)) return k;
    throw config_error("unknown backend '" + std::string(s) +
                       "' (lsa|wcd|wmd|wmd_pruned|pv_dm|pv_dbow|pv_dm_plus_dbow)");
}

inline bool uses_embeddings(backend_kind k) {
    return k == backend_kind::wcd || k == backend_kind::wmd || k == backend_kind::wmd_pruned;
}

inline bool uses_paragraph_vectors(backend_kind k) {
    return k == backend_kind::pv_dm || k == backend_kind::pv_dbow || k == backend_kind::pv_dm_plus_dbow;
}

struct backend_spec {
    backend_kind kind = backend_kind::wmd;
    /// Report label; defaults to the kind name.
    std::string name;
    std::string embedding_path;
    embedding_format format = embedding_format::automatic;
    /// Optional subword vectors for out-of-vocabulary tokens.
    std::string ngram_path;
    std::size_t ngram_min = 3;
    std::size_t ngram_max = 6;
    bool skip_malformed_rows = false;
    ground_metric metric = ground_metric::cosine;
    /// Exact solves before pruning starts (wmd_pruned); 0 means 2k.
    std::size_t prefetch = 0;
    std::size_t lsa_dim = 300;
    /// Paragraph-vector settings; mode and seed come from `kind` and `seed`.
    pv::config pv;
    pv::query_representation pv_query = pv::query_representation::inference;
    /// Inference passes per query; 0 means the training epoch count.
    std::size_t pv_infer_steps = 0;
    /// Seeds the SVD start block and paragraph-vector training.
    std::uint64_t seed = 1;

    std::string label() const { return name.empty() ? to_string(kind) : name; }

    void validate() const {
        if (uses_embeddings(kind) && embedding_path.empty())
            throw config_error("backend " + label() + " needs an embedding file");
        if (kind == backend_kind::lsa && lsa_dim == 0) throw config_error("lsa dimension must be positive");
        if (uses_paragraph_vectors(kind)) pv.validate();
    }
};

struct ranked_result {
    std::string query_id;
    std::vector<scored_statement> hits;
    /// Query tokens the backend could not represent.
    std::size_t dropped_tokens = 0;
};

/// Preloaded resources that override the files named in the spec.
struct build_options {
    const embedding_table* embeddings = nullptr;
    const ngram_table* ngrams = nullptr;
    /// Tokens to resolve up front besides the corpus vocabulary (known queries).
    std::vector<std::string> extra_tokens;
};

namespace detail {

/// Word vectors for `wanted`, taken from `source` or synthesized from
/// n-grams, in sorted token order.
inline embedding_table resolve_vocabulary(const std::set<std::string>& wanted, const embedding_table& source,
                                          const ngram_table* ngrams) {
    embedding_table out(source.dim());
    for (const auto& t : wanted)
        if (auto v = lookup_or_synthesize(source, ngrams, t)) out.add(t, *v);
    return out;
}

inline std::unordered_set<std::string> ngrams_of(const std::set<std::string>& tokens, std::size_t nmin,
                                                 std::size_t nmax) {
    std::unordered_set<std::string> grams;
    for (const auto& t : tokens)
        for (auto& g : extract_ngrams(t, nmin, nmax)) grams.insert(std::move(g));
    return grams;
}

inline void write_table(std::ostream& out, const embedding_table& t) {
    io::write<std::uint64_t>(out, t.dim());
    io::write(out, t.tokens());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (float x : t.row(i)) io::write(out, x);
}

inline embedding_table read_table(std::istream& in) {
    const auto dim = io::read_size(in, 1u << 20);
    embedding_table t(dim);
    const auto tokens = io::read_strings(in);
    std::vector<float> row(dim);
    for (const auto& tok : tokens) {
        for (auto& x : row) x = io::read<float>(in);
        if (!t.add(tok, row)) throw format_error("duplicate token '" + tok + "' in index");
    }
    return t;
}

}  // namespace detail

/// Loads only the rows needed for `wanted` from the spec's files.
inline embedding_table load_vectors_for(const backend_spec& spec, const std::set<std::string>& wanted) {
    embedding_load_options opts;
    const std::unordered_set<std::string> filter(wanted.begin(), wanted.end());
    opts.vocabulary = &filter;
    opts.skip_malformed_rows = spec.skip_malformed_rows;
    const auto source = load_embeddings(spec.embedding_path, spec.format, opts);
    if (spec.ngram_path.empty()) return detail::resolve_vocabulary(wanted, source, nullptr);

    std::set<std::string> missing;
    for (const auto& t : wanted)
        if (!source.contains(t)) missing.insert(t);
    const auto grams = detail::ngrams_of(missing, spec.ngram_min, spec.ngram_max);
    embedding_load_options gram_opts;
    gram_opts.vocabulary = &grams;
    const ngram_table table(load_embeddings(spec.ngram_path, embedding_format::automatic, gram_opts), spec.ngram_min,
                            spec.ngram_max);
    return detail::resolve_vocabulary(wanted, source, &table);
}

/// Immutable search index for one backend over one corpus.
class index {
public:
    index(index&&) noexcept = default;
    index& operator=(index&&) noexcept = default;
    index(const index&) = delete;
    index& operator=(const index&) = delete;

    static index build(std::vector<statement> corpus, stopword_set stops, const backend_spec& spec,
                       const build_options& opts = {}) {
        spec.validate();
        if (corpus.empty()) throw empty_document_error("corpus has no statements");
        index ix;
        ix.spec_ = spec;
        ix.stops_ = std::move(stops);
        ix.statements_ = std::move(corpus);
        ix.fit(opts);
        return ix;
    }

    const backend_spec& spec() const { return spec_; }
    const std::vector<statement>& statements() const { return statements_; }
    const stopword_set& stopwords() const { return stops_; }

    const statement* find_statement(statement_id id) const {
        if (id < statements_.size() && statements_[id].id == id) return &statements_[id];
        for (const auto& s : statements_)
            if (s.id == id) return &s;
        return nullptr;
    }

    /// Statements that can be ranked by this backend.
    std::size_t rankable() const {
        if (lsa_) return lsa_->doc_ids().size();
        if (pv_) return pv_->doc_ids().size();
        return docs_.size();
    }

    /// Resolved word vectors (embedding backends only).
    const embedding_table* vectors() const { return vectors_.get(); }
    const std::vector<indexed_document>& documents() const { return docs_; }
    const lsa::model* lsa_model() const { return lsa_.get(); }
    const pv::model* pv_model() const { return pv_.get(); }

    /// Runs the text pipeline on `query` and returns the best k statements.
    /// Throws empty_query_error when no query token survives.
    ranked_result rank(std::string_view query, std::size_t k = 20, std::string query_id = {}) const {
        return rank_tokens(tokenize(normalize_text(query), stops_), k, std::move(query_id));
    }

    ranked_result rank_tokens(const std::vector<std::string>& tokens, std::size_t k = 20,
                              std::string query_id = {}) const {
        if (tokens.empty()) throw empty_query_error("query is empty after stop-word removal");
        ranked_result r;
        r.query_id = std::move(query_id);
        if (lsa_) {
            r.hits = lsa_->rank(tokens, k, &r.dropped_tokens);
        } else if (pv_) {
            r.dropped_tokens = static_cast<std::size_t>(
                std::count_if(tokens.begin(), tokens.end(), [&](const auto& t) { return !pv_->word_index(t); }));
            r.hits = pv::pv_rank(*pv_, tokens, k, spec_.pv_query, spec_.pv_infer_steps);
        } else {
            r.hits = rank_embedded(tokens, k, r.dropped_tokens);
        }
        return r;
    }

    void save(std::ostream& out) const {
        io::write_header(out, "SSIDX", 1);
        io::write(out, std::string_view{to_string(spec_.kind)});
        io::write(out, std::string_view{spec_.name});
        io::write(out, std::string_view{spec_.embedding_path});
        io::write<std::uint32_t>(out, static_cast<std::uint32_t>(spec_.format));
        io::write(out, std::string_view{spec_.ngram_path});
        io::write<std::uint64_t>(out, spec_.ngram_min);
        io::write<std::uint64_t>(out, spec_.ngram_max);
        io::write<std::uint8_t>(out, spec_.skip_malformed_rows ? 1 : 0);
        io::write(out, to_string(spec_.metric));
        io::write<std::uint64_t>(out, spec_.prefetch);
        io::write<std::uint64_t>(out, spec_.lsa_dim);
        io::write<std::uint32_t>(out, static_cast<std::uint32_t>(spec_.pv_query));
        io::write<std::uint64_t>(out, spec_.pv_infer_steps);
        io::write<std::uint64_t>(out, spec_.seed);
        io::write(out, stops_.words());
        io::write<std::uint64_t>(out, statements_.size());
        for (const auto& s : statements_) {
            io::write<std::uint64_t>(out, s.id);
            io::write(out, std::string_view{s.raw});
            io::write(out, s.tokens);
        }
        if (vectors_) detail::write_table(out, *vectors_);
        if (lsa_) lsa_->save(out);
        if (pv_) pv_->save(out);
    }

    static index load(std::istream& in) {
        io::read_header(in, "SSIDX", 1);
        index ix;
        auto& sp = ix.spec_;
        sp.kind = parse_backend_kind(io::read_string(in));
        sp.name = io::read_string(in);
        sp.embedding_path = io::read_string(in);
        const auto format = io::read<std::uint32_t>(in);
        if (format > 3) throw format_error("bad embedding format tag in index");
        sp.format = static_cast<embedding_format>(format);
        sp.ngram_path = io::read_string(in);
        sp.ngram_min = io::read<std::uint64_t>(in);
        sp.ngram_max = io::read<std::uint64_t>(in);
        sp.skip_malformed_rows = io::read<std::uint8_t>(in) != 0;
        sp.metric = parse_ground_metric(io::read_string(in));
        sp.prefetch = io::read<std::uint64_t>(in);
        sp.lsa_dim = io::read<std::uint64_t>(in);
        const auto rep = io::read<std::uint32_t>(in);
        if (rep > 1) throw format_error("bad query representation tag in index");
        sp.pv_query = static_cast<pv::query_representation>(rep);
        sp.pv_infer_steps = io::read<std::uint64_t>(in);
        sp.seed = io::read<std::uint64_t>(in);
        ix.stops_ = stopword_set(io::read_strings(in));
        ix.statements_.resize(io::read_size(in));
        for (auto& s : ix.statements_) {
            s.id = io::read<std::uint64_t>(in);
            s.raw = io::read_string(in);
            s.tokens = io::read_strings(in);
        }
        if (uses_embeddings(sp.kind)) {
            ix.vectors_ = std::make_unique<embedding_table>(detail::read_table(in));
            ix.embed_statements();
        } else if (sp.kind == backend_kind::lsa) {
            ix.lsa_ = std::make_unique<lsa::model>(lsa::model::load(in));
        } else {
            ix.pv_ = std::make_unique<pv::model>(pv::model::load(in));
            sp.pv = ix.pv_->settings();
        }
        return ix;
    }

private:
    index() = default;

    void fit(const build_options& opts) {
        if (spec_.kind == backend_kind::lsa) {
            lsa::svd_options svd;
            svd.seed = spec_.seed;
            lsa_ = std::make_unique<lsa::model>(lsa::model::build(statements_, spec_.lsa_dim, svd));
            return;
        }
        if (uses_paragraph_vectors(spec_.kind)) {
            auto cfg = spec_.pv;
            cfg.kind = spec_.kind == backend_kind::pv_dm     ? pv::mode::dm
                       : spec_.kind == backend_kind::pv_dbow ? pv::mode::dbow
                                                              : pv::mode::dm_plus_dbow;
            cfg.seed = spec_.seed;
            spec_.pv = cfg;
            pv_ = std::make_unique<pv::model>(pv::train_pv(statements_, cfg));
            return;
        }
        std::set<std::string> wanted(opts.extra_tokens.begin(), opts.extra_tokens.end());
        for (const auto& s : statements_) wanted.insert(s.tokens.begin(), s.tokens.end());
        if (opts.embeddings) {
            vectors_ = std::make_unique<embedding_table>(detail::resolve_vocabulary(wanted, *opts.embeddings, opts.ngrams));
        } else {
            vectors_ = std::make_unique<embedding_table>(load_vectors_for(spec_, wanted));
        }
        embed_statements();
        if (docs_.empty()) throw empty_document_error("no statement has a token with a word vector");
    }

    void embed_statements() {
        docs_.clear();
        for (const auto& s : statements_) {
            const bool any = std::any_of(s.tokens.begin(), s.tokens.end(),
                                         [&](const auto& t) { return vectors_->contains(t); });
            if (any) docs_.push_back({s.id, embed_document(s.tokens, *vectors_)});
        }
    }

    std::vector<scored_statement> rank_embedded(const std::vector<std::string>& tokens, std::size_t k,
                                                std::size_t& dropped) const {
        // Tokens outside the index vocabulary are looked up again in the
        // source files when those are still readable.
        std::set<std::string> missing;
        for (const auto& t : tokens)
            if (!vectors_->contains(t)) missing.insert(t);
        embedding_table extra(vectors_->dim());
        if (!missing.empty() && std::filesystem::exists(spec_.embedding_path)) extra = load_vectors_for(spec_, missing);

        auto resolve = [&](const std::string& t) -> std::optional<std::span<const float>> {
            if (auto v = vectors_->vector_of(t)) return v;
            return extra.vector_of(t);
        };
        dropped = static_cast<std::size_t>(
            std::count_if(tokens.begin(), tokens.end(), [&](const auto& t) { return !resolve(t); }));
        if (dropped == tokens.size()) throw empty_query_error("no query token has a word vector");
        const auto query = embed_document_with(tokens, resolve);

        switch (spec_.kind) {
            case backend_kind::wcd: {
                std::vector<scored_statement> all;
                all.reserve(docs_.size());
                for (const auto& d : docs_) {
                    const double dist = wcd(query, d.doc, spec_.metric);
                    all.push_back({d.id, dist == 0.0 ? 0.0 : -dist});
                }
                return top_k(std::move(all), k);
            }
            case backend_kind::wmd:
                return exhaustive_topk(query, docs_, k, spec_.metric);
            default: {
                const auto m = spec_.prefetch == 0 ? 2 * k : spec_.prefetch;
                return prune_topk(query, docs_, k, m, spec_.metric);
            }
        }
    }

    backend_spec spec_;
    stopword_set stops_;
    std::vector<statement> statements_;
    std::unique_ptr<embedding_table> vectors_;
    std::vector<indexed_document> docs_;
    std::unique_ptr<lsa::model> lsa_;
    std::unique_ptr<pv::model> pv_;
};

}  // namespace semsearch::retrieval

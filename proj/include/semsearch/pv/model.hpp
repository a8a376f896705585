#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "semsearch/common/binary_io.hpp"
#include "semsearch/common/errors.hpp"
#include "semsearch/common/random.hpp"
#include "semsearch/common/ranking.hpp"
#include "semsearch/pv/network.hpp"
#include "semsearch/text/pipeline.hpp"

namespace semsearch::pv {

struct config {
    mode kind = mode::dm;
    std::size_t dim = 100;
    std::size_t window = 5;
    std::size_t negative = 5;
    std::size_t epochs = 40;
    double lr_start = 0.025;
    double lr_end = 0.0001;
    std::size_t min_count = 1;
    std::uint64_t seed = 1;

    void validate() const {
        if (dim == 0) throw config_error("pv dim must be positive");
        if (window == 0) throw config_error("pv window must be positive");
        if (negative == 0) throw config_error("pv negative must be at least 1");
        if (epochs == 0) throw config_error("pv epochs must be at least 1");
        if (!(lr_start > 0) || !(lr_end >= 0) || lr_end > lr_start)
            throw config_error("pv learning rate must satisfy 0 <= end <= start, start > 0");
        if (min_count == 0) throw config_error("pv min_count must be at least 1");
    }

    friend bool operator==(const config&, const config&) = default;
};

/// How a query becomes a vector: inferred paragraph vector, or the mean of
/// the query's word vectors.
enum class query_representation { inference, centroid };

/// Draws word ids with probability proportional to count^0.75.
class noise_sampler {
public:
    noise_sampler() = default;
    explicit noise_sampler(const std::vector<std::uint64_t>& counts) {
        double total = 0.0;
        cumulative_.reserve(counts.size());
        for (auto c : counts) cumulative_.push_back(total += std::pow(static_cast<double>(c), 0.75));
    }

    std::size_t draw(rng& gen) const {
        const double x = gen.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    }

    double probability(std::size_t w) const {
        const double lo = w == 0 ? 0.0 : cumulative_[w - 1];
        return (cumulative_[w] - lo) / cumulative_.back();
    }

private:
    std::vector<double> cumulative_;
};

/// Trained paragraph vectors for a corpus. For the combined mode `nets`
/// holds a PV-DM and a PV-DBOW network trained independently.
class model {
public:
    const config& settings() const { return config_; }
    const std::vector<std::string>& vocabulary() const { return vocab_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    /// Statement id of each paragraph-vector row.
    const std::vector<statement_id>& doc_ids() const { return doc_ids_; }
    const std::vector<network>& networks() const { return nets_; }
    std::vector<network>& networks() { return nets_; }
    const noise_sampler& noise() const { return noise_; }
    /// Mean sampled loss per example of each training epoch.
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

    /// Length of stored and inferred representations: dim, or 2 dim combined.
    std::size_t representation_dim() const { return config_.dim * nets_.size(); }

    std::optional<std::size_t> word_index(const std::string& token) const {
        const auto it = index_.find(token);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// In-vocabulary word ids of `tokens`, in order.
    std::vector<std::size_t> encode(const std::vector<std::string>& tokens) const {
        std::vector<std::size_t> out;
        for (const auto& t : tokens)
            if (auto w = word_index(t)) out.push_back(*w);
        return out;
    }

    std::vector<double> paragraph_vector(std::size_t row) const {
        std::vector<double> v;
        v.reserve(representation_dim());
        for (const auto& net : nets_) {
            const auto p = net.paragraph(row);
            v.insert(v.end(), p.begin(), p.end());
        }
        return v;
    }

    void save(std::ostream& out) const {
        io::write_header(out, "SSPV", 1);
        io::write<std::uint32_t>(out, static_cast<std::uint32_t>(config_.kind));
        for (auto v : {config_.dim, config_.window, config_.negative, config_.epochs, config_.min_count})
            io::write<std::uint64_t>(out, v);
        io::write(out, config_.lr_start);
        io::write(out, config_.lr_end);
        io::write<std::uint64_t>(out, config_.seed);
        io::write(out, vocab_);
        io::write(out, counts_);
        std::vector<std::uint64_t> ids(doc_ids_.begin(), doc_ids_.end());
        io::write(out, ids);
        io::write(out, epoch_losses_);
        io::write<std::uint64_t>(out, nets_.size());
        for (const auto& n : nets_) {
            io::write<std::uint8_t>(out, n.dm ? 1 : 0);
            io::write(out, n.word_in);
            io::write(out, n.word_out);
            io::write(out, n.paragraphs);
        }
    }

    static model load(std::istream& in) {
        io::read_header(in, "SSPV", 1);
        model m;
        const auto kind = io::read<std::uint32_t>(in);
        if (kind > 2) throw format_error("bad paragraph-vector mode in model file");
        m.config_.kind = static_cast<mode>(kind);
        for (auto* v : {&m.config_.dim, &m.config_.window, &m.config_.negative, &m.config_.epochs, &m.config_.min_count})
            *v = io::read<std::uint64_t>(in);
        m.config_.lr_start = io::read<double>(in);
        m.config_.lr_end = io::read<double>(in);
        m.config_.seed = io::read<std::uint64_t>(in);
        m.vocab_ = io::read_strings(in);
        m.counts_ = io::read_vector<std::uint64_t>(in);
        const auto ids = io::read_vector<std::uint64_t>(in);
        m.doc_ids_.assign(ids.begin(), ids.end());
        m.epoch_losses_ = io::read_vector<double>(in);
        const auto nets = io::read_size(in, 2);
        const std::size_t d = m.config_.dim;
        for (std::uint64_t i = 0; i < nets; ++i) {
            network n;
            n.dm = io::read<std::uint8_t>(in) != 0;
            n.dim = d;
            n.word_in = io::read_vector<double>(in);
            n.word_out = io::read_vector<double>(in);
            n.paragraphs = io::read_vector<double>(in);
            const auto v = m.vocab_.size();
            if ((n.dm ? n.word_in.size() != v * d : !n.word_in.empty()) || n.word_out.size() != v * d ||
                n.paragraphs.size() != m.doc_ids_.size() * d)
                throw format_error("paragraph-vector model blocks have inconsistent sizes");
            m.nets_.push_back(std::move(n));
        }
        if (m.counts_.size() != m.vocab_.size() || m.nets_.size() != (m.config_.kind == mode::dm_plus_dbow ? 2u : 1u))
            throw format_error("paragraph-vector model file is inconsistent");
        m.finish();
        return m;
    }

private:
    friend model train_pv(const std::vector<statement>&, const config&,
                          const std::function<void(std::size_t, const model&)>&);

    void finish() {
        index_.clear();
        for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
        noise_ = noise_sampler(counts_);
    }

    config config_;
    std::vector<std::string> vocab_;
    std::vector<std::uint64_t> counts_;
    std::vector<statement_id> doc_ids_;
    std::vector<network> nets_;
    std::vector<double> epoch_losses_;
    std::unordered_map<std::string, std::size_t> index_;
    noise_sampler noise_;
};

namespace detail {

/// Training/inference example at `pos`. The DM window is shrunk to a random
/// radius in [1, window], as in word2vec.
inline example make_example(const std::vector<std::size_t>& words, std::size_t pos, const network& net,
                            const config& cfg, const noise_sampler& noise, rng& gen) {
    example ex;
    ex.target = words[pos];
    if (net.dm) {
        const std::size_t radius = 1 + static_cast<std::size_t>(gen.below(cfg.window));
        const std::size_t lo = pos >= radius ? pos - radius : 0;
        const std::size_t hi = std::min(words.size() - 1, pos + radius);
        for (std::size_t j = lo; j <= hi; ++j)
            if (j != pos) ex.context.push_back(words[j]);
    }
    for (std::size_t n = 0; n < cfg.negative; ++n) {
        const auto w = noise.draw(gen);
        if (w != ex.target) ex.negatives.push_back(w);
    }
    return ex;
}

inline void init_vector(std::span<double> v, std::size_t dim, rng& gen) {
    for (auto& x : v) x = (gen.uniform() - 0.5) / static_cast<double>(dim);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    return stable_hash(std::to_string(salt), seed ^ 0x9e3779b97f4a7c15ull);
}

inline double learning_rate(const config& cfg, std::size_t done, std::size_t total) {
    const double frac = total == 0 ? 0.0 : static_cast<double>(done) / static_cast<double>(total);
    return cfg.lr_start - (cfg.lr_start - cfg.lr_end) * frac;
}

}  // namespace detail

/// Trains paragraph vectors with negative sampling. Single-threaded and
/// fully deterministic for a fixed config. `on_epoch(e, m)` is called with
/// e = 0 after initialization and then after every epoch e.
inline model train_pv(const std::vector<statement>& corpus, const config& cfg,
                      const std::function<void(std::size_t, const model&)>& on_epoch = {}) {
    cfg.validate();
    std::map<std::string, std::uint64_t> freq;
    for (const auto& s : corpus)
        for (const auto& t : s.tokens) ++freq[t];

    model m;
    m.config_ = cfg;
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [t, c] : freq)
        if (c >= cfg.min_count) kept.emplace_back(t, c);
    if (kept.empty()) throw empty_document_error("paragraph-vector vocabulary is empty");
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (auto& [t, c] : kept) {
        m.vocab_.push_back(t);
        m.counts_.push_back(c);
    }
    m.finish();

    std::vector<std::vector<std::size_t>> docs;
    for (const auto& s : corpus) {
        auto words = m.encode(s.tokens);
        if (words.empty()) continue;
        m.doc_ids_.push_back(s.id);
        docs.push_back(std::move(words));
    }
    if (docs.empty()) throw empty_document_error("no statement has an in-vocabulary token");

    std::size_t tokens_per_epoch = 0;
    for (const auto& d : docs) tokens_per_epoch += d.size();
    const std::size_t total = tokens_per_epoch * cfg.epochs * (cfg.kind == mode::dm_plus_dbow ? 2 : 1);

    const std::size_t v = m.vocab_.size();
    std::vector<bool> dm_flags;
    if (cfg.kind != mode::dbow) dm_flags.push_back(true);
    if (cfg.kind != mode::dm) dm_flags.push_back(false);
    std::vector<rng> gens;
    for (std::size_t i = 0; i < dm_flags.size(); ++i) {
        network n;
        n.dm = dm_flags[i];
        n.dim = cfg.dim;
        rng init(detail::mix(cfg.seed, 2 * i));
        if (n.dm) {
            n.word_in.resize(v * cfg.dim);
            detail::init_vector(n.word_in, cfg.dim, init);
        }
        n.word_out.assign(v * cfg.dim, 0.0);
        n.paragraphs.resize(docs.size() * cfg.dim);
        detail::init_vector(n.paragraphs, cfg.dim, init);
        m.nets_.push_back(std::move(n));
        gens.emplace_back(detail::mix(cfg.seed, 2 * i + 1));
    }

    if (on_epoch) on_epoch(0, m);
    std::size_t done = 0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double loss = 0.0;
        std::size_t examples = 0;
        for (std::size_t i = 0; i < m.nets_.size(); ++i) {
            auto& net = m.nets_[i];
            for (std::size_t d = 0; d < docs.size(); ++d) {
                for (std::size_t pos = 0; pos < docs[d].size(); ++pos) {
                    const auto ex = detail::make_example(docs[d], pos, net, cfg, m.noise_, gens[i]);
                    const auto g = compute_gradient(net, net.paragraph(d), ex);
                    apply_gradient(net, net.paragraph(d), g, detail::learning_rate(cfg, done++, total));
                    loss += g.loss;
                    ++examples;
                }
            }
        }
        m.epoch_losses_.push_back(loss / static_cast<double>(examples));
        if (on_epoch) on_epoch(epoch, m);
    }
    return m;
}

/// Negative-sampling objective of the whole training corpus with fixed
/// negatives and full windows, so successive models can be compared.
/// `corpus` must be the training corpus.
inline double corpus_objective(const model& m, const std::vector<statement>& corpus, std::uint64_t seed) {
    const auto& full = m.settings();
    double total = 0.0;
    for (std::size_t i = 0; i < m.networks().size(); ++i) {
        const auto& net = m.networks()[i];
        rng gen(detail::mix(seed, i));
        std::size_t row = 0;
        for (const auto& s : corpus) {
            const auto words = m.encode(s.tokens);
            if (words.empty()) continue;
            for (std::size_t pos = 0; pos < words.size(); ++pos) {
                example ex;
                ex.target = words[pos];
                if (net.dm) {
                    const std::size_t lo = pos >= full.window ? pos - full.window : 0;
                    const std::size_t hi = std::min(words.size() - 1, pos + full.window);
                    for (std::size_t j = lo; j <= hi; ++j)
                        if (j != pos) ex.context.push_back(words[j]);
                }
                for (std::size_t n = 0; n < full.negative; ++n) {
                    const auto w = m.noise().draw(gen);
                    if (w != ex.target) ex.negatives.push_back(w);
                }
                total += example_loss(net, net.paragraph(row), ex);
            }
            ++row;
        }
    }
    return total;
}

/// Fresh paragraph vector for `tokens`, trained for `steps` passes with the
/// word and output weights frozen. The initialization is seeded from the
/// model seed and the tokens, so zero steps returns it unchanged.
inline std::vector<double> infer_vector(const model& m, const std::vector<std::string>& tokens, std::size_t steps) {
    const auto words = m.encode(tokens);
    if (words.empty()) throw empty_query_error("no query token is in the paragraph-vector vocabulary");
    std::uint64_t h = m.settings().seed;
    for (const auto& t : tokens) h = stable_hash(t, stable_hash(" ", h));

    const auto& cfg = m.settings();
    std::vector<double> out;
    for (std::size_t i = 0; i < m.networks().size(); ++i) {
        const auto& net = m.networks()[i];
        rng gen(detail::mix(h, i));
        std::vector<double> p(cfg.dim);
        detail::init_vector(p, cfg.dim, gen);
        const std::size_t total = steps * words.size();
        std::size_t done = 0;
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t pos = 0; pos < words.size(); ++pos) {
                const auto ex = detail::make_example(words, pos, net, cfg, m.noise(), gen);
                const auto g = compute_gradient(net, p, ex);
                apply_paragraph_gradient(p, g, detail::learning_rate(cfg, done++, total));
            }
        }
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

/// Mean word vector of the in-vocabulary query tokens: input vectors for
/// PV-DM, output vectors for PV-DBOW (which has no trained input vectors).
inline std::vector<double> query_centroid(const model& m, const std::vector<std::string>& tokens) {
    const auto words = m.encode(tokens);
    if (words.empty()) throw empty_query_error("no query token is in the paragraph-vector vocabulary");
    std::vector<double> out;
    for (const auto& net : m.networks()) {
        std::vector<double> c(net.dim, 0.0);
        for (auto w : words) {
            const auto row = net.dm ? net.in_row(w) : net.out_row(w);
            for (std::size_t k = 0; k < net.dim; ++k) c[k] += row[k];
        }
        for (auto& x : c) x /= static_cast<double>(words.size());
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = std::sqrt(detail::dot(a, a));
    const double nb = std::sqrt(detail::dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return detail::dot(a, b) / (na * nb);
}

/// Statements by descending cosine to the query vector, ties by id.
inline std::vector<scored_statement> rank_vector(const model& m, const std::vector<double>& q, std::size_t k) {
    std::vector<scored_statement> all;
    all.reserve(m.doc_ids().size());
    for (std::size_t row = 0; row < m.doc_ids().size(); ++row)
        all.push_back({m.doc_ids()[row], cosine(q, m.paragraph_vector(row))});
    return top_k(std::move(all), k);
}

/// `steps` 0 means the training epoch count.
inline std::vector<scored_statement> pv_rank(const model& m, const std::vector<std::string>& tokens, std::size_t k,
                                             query_representation rep = query_representation::inference,
                                             std::size_t steps = 0) {
    const auto q = rep == query_representation::inference
                       ? infer_vector(m, tokens, steps == 0 ? m.settings().epochs : steps)
                       : query_centroid(m, tokens);
    return rank_vector(m, q, k);
}

}  // namespace semsearch::pv

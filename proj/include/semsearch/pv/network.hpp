#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semsearch/common/errors.hpp"

namespace semsearch::pv {

enum class mode { dm, dbow, dm_plus_dbow };

inline std::string to_string(mode m) {
    switch (m) {
        case mode::dm: return "pv_dm";
        case mode::dbow: return "pv_dbow";
        case mode::dm_plus_dbow: return "pv_dm_plus_dbow";
    }
    return "?";
}

inline mode parse_mode(std::string_view s) {
    if (s == "pv_dm" || s == "dm") return mode::dm;
    if (s == "pv_dbow" || s == "dbow") return mode::dbow;
    if (s == "pv_dm_plus_dbow" || s == "dm+dbow" || s == "combined") return mode::dm_plus_dbow;
    throw config_error("unknown paragraph-vector mode '" + std::string(s) + "'");
}

/// Weights of one architecture (PV-DM or PV-DBOW). Every block is row-major
/// with `dim` columns. word_in is empty for PV-DBOW.
struct network {
    bool dm = true;
    std::size_t dim = 0;
    std::vector<double> word_in;
    std::vector<double> word_out;
    std::vector<double> paragraphs;

    std::span<double> in_row(std::size_t w) { return {word_in.data() + w * dim, dim}; }
    std::span<const double> in_row(std::size_t w) const { return {word_in.data() + w * dim, dim}; }
    std::span<double> out_row(std::size_t w) { return {word_out.data() + w * dim, dim}; }
    std::span<const double> out_row(std::size_t w) const { return {word_out.data() + w * dim, dim}; }
    std::span<double> paragraph(std::size_t d) { return {paragraphs.data() + d * dim, dim}; }
    std::span<const double> paragraph(std::size_t d) const { return {paragraphs.data() + d * dim, dim}; }

    friend bool operator==(const network&, const network&) = default;
};

/// One negative-sampling training case. For PV-DM the hidden vector is the
/// mean of the paragraph vector and the context word vectors; for PV-DBOW it
/// is the paragraph vector alone and `context` is ignored.
struct example {
    std::vector<std::size_t> context;
    std::size_t target = 0;
    std::vector<std::size_t> negatives;
};

/// Loss of one example and its gradient, sparse over word rows. Rows may
/// repeat (a word twice in a context); contributions add.
struct example_gradient {
    double loss = 0.0;
    std::vector<double> paragraph;
    std::vector<std::pair<std::size_t, std::vector<double>>> word_in;
    std::vector<std::pair<std::size_t, std::vector<double>>> word_out;
};

namespace detail {

inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

/// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<double> hidden(const network& net, std::span<const double> paragraph, const example& ex) {
    std::vector<double> h(paragraph.begin(), paragraph.end());
    if (!net.dm || ex.context.empty()) return h;
    for (auto c : ex.context) {
        const auto row = net.in_row(c);
        for (std::size_t k = 0; k < net.dim; ++k) h[k] += row[k];
    }
    const double scale = 1.0 / static_cast<double>(ex.context.size() + 1);
    for (auto& x : h) x *= scale;
    return h;
}

}  // namespace detail

/// -log s(o_t.h) - sum_n log s(-o_n.h)
inline double example_loss(const network& net, std::span<const double> paragraph, const example& ex) {
    const auto h = detail::hidden(net, paragraph, ex);
    double loss = -detail::log_sigmoid(detail::dot(net.out_row(ex.target), h));
    for (auto n : ex.negatives) loss -= detail::log_sigmoid(-detail::dot(net.out_row(n), h));
    return loss;
}

inline example_gradient compute_gradient(const network& net, std::span<const double> paragraph, const example& ex) {
    const auto h = detail::hidden(net, paragraph, ex);
    example_gradient g;
    std::vector<double> dh(net.dim, 0.0);
    auto score = [&](std::size_t word, double label) {
        const auto out = net.out_row(word);
        const double z = detail::dot(out, h);
        g.loss -= detail::log_sigmoid(label > 0 ? z : -z);
        const double coeff = detail::sigmoid(z) - label;
        for (std::size_t k = 0; k < net.dim; ++k) dh[k] += coeff * out[k];
        std::vector<double> dout(net.dim);
        for (std::size_t k = 0; k < net.dim; ++k) dout[k] = coeff * h[k];
        g.word_out.emplace_back(word, std::move(dout));
    };
    score(ex.target, 1.0);
    for (auto n : ex.negatives) score(n, 0.0);

    if (net.dm && !ex.context.empty()) {
        const double scale = 1.0 / static_cast<double>(ex.context.size() + 1);
        for (auto& x : dh) x *= scale;
        for (auto c : ex.context) g.word_in.emplace_back(c, dh);
    }
    g.paragraph = std::move(dh);
    return g;
}

/// Gradient step on the paragraph vector only (inference).
inline void apply_paragraph_gradient(std::span<double> paragraph, const example_gradient& g, double lr) {
    for (std::size_t k = 0; k < paragraph.size(); ++k) paragraph[k] -= lr * g.paragraph[k];
}

/// Gradient step on the paragraph vector and every touched word row.
inline void apply_gradient(network& net, std::span<double> paragraph, const example_gradient& g, double lr) {
    apply_paragraph_gradient(paragraph, g, lr);
    for (const auto& [w, d] : g.word_in) {
        auto row = net.in_row(w);
        for (std::size_t k = 0; k < net.dim; ++k) row[k] -= lr * d[k];
    }
    for (const auto& [w, d] : g.word_out) {
        auto row = net.out_row(w);
        for (std::size_t k = 0; k < net.dim; ++k) row[k] -= lr * d[k];
    }
}

}  // namespace semsearch::pv

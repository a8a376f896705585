#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/embedding/table.hpp"

namespace semsearch {

struct embedding_load_options {
    /// When set, only tokens in this set are kept. The file is still read in
    /// a single streaming pass.
    const std::unordered_set<std::string>* vocabulary = nullptr;
    /// Text formats only: skip rows with the wrong field count instead of
    /// failing (some published GloVe files contain tokens with spaces).
    bool skip_malformed_rows = false;
};

namespace detail {

inline bool wanted(const embedding_load_options& opts, std::string_view token) {
    return opts.vocabulary == nullptr || opts.vocabulary->contains(std::string(token));
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) break;
        const auto start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        fields.push_back(line.substr(start, pos - start));
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline std::pair<std::size_t, std::size_t> parse_count_dim(std::string_view line, const std::string& what) {
    const auto fields = split_fields(line);
    std::size_t count = 0;
    std::size_t dim = 0;
    if (fields.size() != 2 || !parse_number(fields[0], count) || !parse_number(fields[1], dim) || dim == 0)
        throw format_error(what + ": malformed header '" + std::string(line) + "', expected '<count> <dim>'");
    return {count, dim};
}

inline std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open embedding file " + path);
    return in;
}

}  // namespace detail

/// Original word2vec binary format: "<count> <dim>\n" followed by, per
/// entry, the token, one space, and dim little-endian float32 values.
inline embedding_table read_word2vec_binary(std::istream& in, const embedding_load_options& opts = {},
                                            const std::string& name = "word2vec binary") {
    std::string header;
    if (!std::getline(in, header)) throw format_error(name + ": missing header");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto [count, dim] = detail::parse_count_dim(header, name);

    embedding_table table(dim);
    if (opts.vocabulary == nullptr) table.reserve(count);
    std::vector<float> values(dim);
    std::string token;
    for (std::size_t i = 0; i < count; ++i) {
        token.clear();
        int c = in.get();
        while (c == '\n' || c == '\r') c = in.get();
        while (c != std::char_traits<char>::eof() && c != ' ') {
            token.push_back(static_cast<char>(c));
            c = in.get();
        }
        if (c == std::char_traits<char>::eof())
            throw format_error(name + ": truncated after " + std::to_string(i) + " of " + std::to_string(count) +
                               " entries");
        if (token.empty()) throw format_error(name + ": empty token at entry " + std::to_string(i));
        if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(dim * sizeof(float))))
            throw format_error(name + ": truncated vector block for entry " + std::to_string(i) + " ('" + token +
                               "')");
        if (detail::wanted(opts, token)) table.add(token, values);
    }
    return table;
}

inline embedding_table load_word2vec_binary(const std::string& path, const embedding_load_options& opts = {}) {
    auto in = detail::open_binary(path);
    return read_word2vec_binary(in, opts, path);
}

/// Whitespace text format, one "token v1 ... vdim" row per line. With
/// has_header the first line is "<count> <dim>" (fastText .vec); otherwise
/// dim is taken from the first row (GloVe).
inline embedding_table read_text_vectors(std::istream& in, bool has_header, const embedding_load_options& opts = {},
                                         const std::string& name = "text vectors") {
    std::string line;
    std::size_t line_no = 0;
    std::size_t declared_count = 0;
    std::size_t dim = 0;
    if (has_header) {
        if (!std::getline(in, line)) throw format_error(name + ": missing header");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::tie(declared_count, dim) = detail::parse_count_dim(line, name);
    }

    embedding_table table;
    bool table_ready = false;
    if (dim > 0) {
        table = embedding_table(dim);
        table_ready = true;
    }
    std::vector<float> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = detail::split_fields(line);
        if (fields.empty()) continue;
        if (!table_ready) {
            if (fields.size() < 2) throw format_error(name + ":" + std::to_string(line_no) + ": row has no values");
            dim = fields.size() - 1;
            table = embedding_table(dim);
            table_ready = true;
        }
        ++rows;
        if (fields.size() != dim + 1) {
            if (opts.skip_malformed_rows) continue;
            throw format_error(name + ":" + std::to_string(line_no) + ": inconsistent dimension (" +
                               std::to_string(fields.size() - 1) + " values, expected " + std::to_string(dim) + ")");
        }
        if (!detail::wanted(opts, fields[0])) continue;
        values.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            if (!detail::parse_number(fields[j + 1], values[j]))
                throw format_error(name + ":" + std::to_string(line_no) + ": non-numeric field '" +
                                   std::string(fields[j + 1]) + "'");
        }
        table.add(fields[0], values);
    }
    if (!table_ready) throw format_error(name + ": no vectors found");
    if (has_header && rows < declared_count)
        throw format_error(name + ": header declares " + std::to_string(declared_count) + " entries but only " +
                           std::to_string(rows) + " present");
    return table;
}

inline embedding_table load_text_vectors(const std::string& path, bool has_header,
                                         const embedding_load_options& opts = {}) {
    auto in = detail::open_binary(path);
    return read_text_vectors(in, has_header, opts, path);
}

inline void write_text_vectors(std::ostream& out, const embedding_table& table, bool with_header) {
    if (with_header) out << table.size() << ' ' << table.dim() << '\n';
    std::array<char, 64> buf{};
    std::string line;
    for (std::size_t i = 0; i < table.size(); ++i) {
        line = table.token(i);
        for (float v : table.row(i)) {
            const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
            line.push_back(' ');
            line.append(buf.data(), res.ptr);
        }
        line.push_back('\n');
        out << line;
    }
}

inline void write_word2vec_binary(std::ostream& out, const embedding_table& table) {
    out << table.size() << ' ' << table.dim() << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.token(i) << ' ';
        const auto row = table.row(i);
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
        out << '\n';
    }
}

enum class embedding_format { automatic, word2vec_binary, text, text_with_header };

inline embedding_format parse_embedding_format(std::string_view s) {
    if (s == "auto") return embedding_format::automatic;
    if (s == "word2vec" || s == "bin") return embedding_format::word2vec_binary;
    if (s == "text" || s == "glove") return embedding_format::text;
    if (s == "vec" || s == "fasttext") return embedding_format::text_with_header;
    throw config_error("unknown embedding format '" + std::string(s) + "' (auto|word2vec|text|vec)");
}

/// ".bin" selects word2vec binary; otherwise a first line of exactly two
/// integers is taken as a .vec header.
inline embedding_format detect_embedding_format(const std::string& path) {
    if (std::filesystem::path(path).extension() == ".bin") return embedding_format::word2vec_binary;
    auto in = detail::open_binary(path);
    std::string first;
    std::getline(in, first);
    const auto fields = detail::split_fields(first);
    std::size_t a = 0;
    std::size_t b = 0;
    if (fields.size() == 2 && detail::parse_number(fields[0], a) && detail::parse_number(fields[1], b))
        return embedding_format::text_with_header;
    return embedding_format::text;
}

inline embedding_table load_embeddings(const std::string& path, embedding_format format = embedding_format::automatic,
                                       const embedding_load_options& opts = {}) {
    if (format == embedding_format::automatic) format = detect_embedding_format(path);
    switch (format) {
        case embedding_format::word2vec_binary:
            return load_word2vec_binary(path, opts);
        case embedding_format::text_with_header:
            return load_text_vectors(path, true, opts);
        default:
            return load_text_vectors(path, false, opts);
    }
}

}  // namespace semsearch

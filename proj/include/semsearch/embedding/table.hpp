#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semsearch/common/errors.hpp"

namespace semsearch {

/// Vocabulary -> dense float vector map with a fixed dimension.
///
/// Rows are stored contiguously in insertion order. The first occurrence of
/// a token wins; later duplicates are recorded and ignored.
class embedding_table {
public:
    embedding_table() = default;
    explicit embedding_table(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw error("embedding dimension must be positive");
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }

    /// Returns false (and records the token) if it is already present.
    bool add(std::string_view token, std::span<const float> values) {
        if (values.size() != dim_)
            throw error("vector for '" + std::string(token) + "' has " + std::to_string(values.size()) +
                        " entries, expected " + std::to_string(dim_));
        auto [it, inserted] = index_.try_emplace(std::string(token), tokens_.size());
        if (!inserted) {
            duplicates_.emplace_back(token);
            return false;
        }
        tokens_.emplace_back(token);
        data_.insert(data_.end(), values.begin(), values.end());
        return true;
    }

    std::optional<std::size_t> find(std::string_view token) const {
        const auto it = index_.find(std::string(token));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(std::string_view token) const { return find(token).has_value(); }

    std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    std::optional<std::span<const float>> vector_of(std::string_view token) const {
        if (auto i = find(token)) return row(*i);
        return std::nullopt;
    }

    const std::string& token(std::size_t i) const { return tokens_[i]; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<std::string>& duplicate_tokens() const { return duplicates_; }

    void reserve(std::size_t rows) {
        tokens_.reserve(rows);
        data_.reserve(rows * dim_);
        index_.reserve(rows);
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> tokens_;
    std::vector<float> data_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> duplicates_;
};

}  // namespace semsearch

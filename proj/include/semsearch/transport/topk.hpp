#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/common/ranking.hpp"
#include "semsearch/transport/distances.hpp"

namespace semsearch {

struct indexed_document {
    statement_id id = 0;
    embedded_document doc;
};

struct topk_stats {
    std::size_t exact_solves = 0;
    std::size_t pruned = 0;
};

namespace detail {

inline double score_of(double distance) { return distance == 0.0 ? 0.0 : -distance; }

/// Bounded best-k list ordered by ascending distance then id.
class best_k {
public:
    explicit best_k(std::size_t k) : k_(k) {}

    bool full() const { return hits_.size() >= k_; }
    double worst_distance() const { return hits_.back().distance; }

    void offer(statement_id id, double distance) {
        const hit h{id, distance};
        if (full() && !before(h, hits_.back())) return;
        hits_.insert(std::upper_bound(hits_.begin(), hits_.end(), h, before), h);
        if (hits_.size() > k_) hits_.pop_back();
    }

    std::vector<scored_statement> ranked() const {
        std::vector<scored_statement> out;
        out.reserve(hits_.size());
        for (const auto& h : hits_) out.push_back({h.id, score_of(h.distance)});
        return out;
    }

private:
    struct hit {
        statement_id id;
        double distance;
    };
    static bool before(const hit& a, const hit& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.id < b.id;
    }

    std::size_t k_;
    std::vector<hit> hits_;
};

}  // namespace detail

/// Exact WMD against every document; best k by ascending distance, ties by
/// id. Scores are negated distances.
inline std::vector<scored_statement> exhaustive_topk(const embedded_document& query,
                                                     std::span<const indexed_document> docs, std::size_t k,
                                                     ground_metric metric, topk_stats* stats = nullptr) {
    if (k == 0) return {};
    detail::best_k best(k);
    for (const auto& d : docs) best.offer(d.id, wmd(query, d.doc, metric).distance);
    if (stats) stats->exact_solves += docs.size();
    return best.ranked();
}

/// Same result as exhaustive_topk with fewer exact solves.
///
/// Candidates are visited in order of centroid distance. The first
/// `prefetch` get an exact solve; after that a candidate is solved only if
/// its relaxed bound does not exceed the current k-th best distance.
inline std::vector<scored_statement> prune_topk(const embedded_document& query, std::span<const indexed_document> docs,
                                                std::size_t k, std::size_t prefetch, ground_metric metric,
                                                topk_stats* stats = nullptr) {
    if (prefetch < k) throw config_error("prefetch must be at least k");
    if (k == 0) return {};

    struct candidate {
        double centroid_distance;
        std::size_t index;
    };
    std::vector<candidate> order;
    order.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) order.push_back({wcd(query, docs[i].doc, metric), i});
    std::sort(order.begin(), order.end(), [&](const candidate& a, const candidate& b) {
        if (a.centroid_distance != b.centroid_distance) return a.centroid_distance < b.centroid_distance;
        return docs[a.index].id < docs[b.index].id;
    });

    // Absorbs rounding in the bound so exact ties are never pruned.
    constexpr double slack = 1e-12;
    detail::best_k best(k);
    topk_stats local;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const auto& d = docs[order[rank].index];
        const auto costs = make_cost_matrix(query, d.doc, metric);
        if (rank >= prefetch && best.full()) {
            const double bound = rwmd(query.bow, d.doc.bow, costs);
            if (bound > best.worst_distance() + slack * (1.0 + best.worst_distance())) {
                ++local.pruned;
                continue;
            }
        }
        best.offer(d.id, wmd(query.bow, d.doc.bow, costs).distance);
        ++local.exact_solves;
    }
    if (stats) {
        stats->exact_solves += local.exact_solves;
        stats->pruned += local.pruned;
    }
    return best.ranked();
}

}  // namespace semsearch

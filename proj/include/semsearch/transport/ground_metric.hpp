#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "semsearch/common/errors.hpp"

namespace semsearch {

enum class ground_metric {
    euclidean,
    cosine,  ///< 1 - cos(u, v)
};

inline std::string_view to_string(ground_metric m) { return m == ground_metric::euclidean ? "euclidean" : "cosine"; }

inline ground_metric parse_ground_metric(std::string_view s) {
    if (s == "euclidean") return ground_metric::euclidean;
    if (s == "cosine") return ground_metric::cosine;
    throw config_error("unknown ground metric '" + std::string(s) + "' (euclidean|cosine)");
}

/// Distance between two equally sized vectors of any arithmetic type.
/// Cosine distance is clamped to [0, 2]; a zero vector has cosine 0 with
/// anything but itself.
template <typename A, typename B>
double ground_distance(const A& a, const B& b, ground_metric metric) {
    const std::size_t dim = std::size(a);
    if (metric == ground_metric::euclidean) {
        double sum = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
            sum += d * d;
        }
        return std::sqrt(sum);
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    bool identical = true;
    for (std::size_t k = 0; k < dim; ++k) {
        const double x = static_cast<double>(a[k]);
        const double y = static_cast<double>(b[k]);
        dot += x * y;
        na += x * x;
        nb += y * y;
        identical = identical && x == y;
    }
    if (identical) return 0.0;
    if (na == 0.0 || nb == 0.0) return 1.0;
    return std::clamp(1.0 - dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 2.0);
}

}  // namespace semsearch

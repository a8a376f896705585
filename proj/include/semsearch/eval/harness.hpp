#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/eval/trials.hpp"
#include "semsearch/retrieval/engine.hpp"

namespace semsearch::eval {

/// Cut-offs reported in every table.
inline constexpr std::size_t report_cutoffs[] = {1, 2, 3, 20};

/// A count out of a total, with the percentage held as integer hundredths
/// so rounding and printing are exact.
struct hit_count {
    std::size_t count = 0;
    std::size_t total = 0;
    std::uint64_t hundredths = 0;

    double percentage() const { return static_cast<double>(hundredths) / 100.0; }

    /// "53 (89.83%)"
    std::string str() const {
        return std::to_string(count) + " (" + std::to_string(hundredths / 100) + "." +
               (hundredths % 100 < 10 ? "0" : "") + std::to_string(hundredths % 100) + "%)";
    }

    friend bool operator==(const hit_count&, const hit_count&) = default;
};

/// 100 count / total, rounded half-up to 2 decimals.
inline hit_count make_hit_count(std::size_t count, std::size_t total) {
    if (total == 0) throw error("hits@k of an empty query set");
    if (count > total) throw error("hit count exceeds query total");
    const std::uint64_t num = 2ull * 10000ull * count + total;
    return {count, total, num / (2ull * total)};
}

/// Queries whose target rank (1-based, nullopt = miss) is at most k.
inline hit_count hits_at(const std::vector<std::optional<std::size_t>>& ranks, std::size_t k) {
    if (k == 0) throw error("hits@k needs k >= 1");
    const auto count = static_cast<std::size_t>(
        std::count_if(ranks.begin(), ranks.end(), [&](const auto& r) { return r && *r >= 1 && *r <= k; }));
    return make_hit_count(count, ranks.size());
}

struct query_outcome {
    std::string trial_id;
    std::size_t query_number = 0;  ///< 1-based within the trial
    statement_id target = 0;
    std::optional<std::size_t> rank;
    std::size_t dropped_tokens = 0;
    std::string note;  ///< why the query could not be ranked, if it failed
};

struct backend_report {
    std::string backend;
    std::string error;  ///< set when the index could not be built
    std::vector<query_outcome> outcomes;

    std::vector<std::optional<std::size_t>> ranks() const {
        std::vector<std::optional<std::size_t>> r;
        r.reserve(outcomes.size());
        for (const auto& o : outcomes) r.push_back(o.rank);
        return r;
    }

    hit_count hits(std::size_t k) const { return hits_at(ranks(), k); }
};

struct eval_options {
    std::size_t k = 20;
    /// Worker threads for query evaluation; results do not depend on it.
    std::size_t jobs = 1;
};

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : workers) t.join();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace detail

/// Ranks every query of every trial with every backend and records where the
/// target landed. A backend that fails to build, or a query it cannot
/// represent, is reported as a miss with a note; the run continues.
inline std::vector<backend_report> evaluate(const std::vector<statement>& corpus, const stopword_set& stops,
                                            const trial_set& trials, const std::vector<retrieval::backend_spec>& specs,
                                            const eval_options& opts = {}) {
    struct job {
        const trial* t;
        std::size_t number;
        std::vector<std::string> tokens;
    };
    std::vector<job> jobs;
    std::set<std::string> query_vocab;
    for (const auto& t : trials.trials)
        for (std::size_t q = 0; q < t.queries.size(); ++q) {
            auto tokens = tokenize(normalize_text(t.queries[q]), stops);
            query_vocab.insert(tokens.begin(), tokens.end());
            jobs.push_back({&t, q + 1, std::move(tokens)});
        }

    // Each embedding source is read once, restricted to corpus and query words.
    std::set<std::string> wanted = query_vocab;
    for (const auto& s : corpus) wanted.insert(s.tokens.begin(), s.tokens.end());
    using source_key = std::tuple<std::string, int, std::string, std::size_t, std::size_t, bool>;
    std::map<source_key, embedding_table> sources;
    std::map<source_key, std::string> source_errors;

    std::vector<backend_report> reports;
    for (const auto& spec : specs) {
        backend_report report;
        report.backend = spec.label();
        std::optional<retrieval::index> ix;
        try {
            retrieval::build_options build;
            build.extra_tokens.assign(query_vocab.begin(), query_vocab.end());
            if (retrieval::uses_embeddings(spec.kind)) {
                const source_key key{spec.embedding_path, static_cast<int>(spec.format), spec.ngram_path,
                                     spec.ngram_min, spec.ngram_max, spec.skip_malformed_rows};
                if (!sources.contains(key) && !source_errors.contains(key)) {
                    try {
                        sources.emplace(key, retrieval::load_vectors_for(spec, wanted));
                    } catch (const std::exception& e) {
                        source_errors.emplace(key, e.what());
                    }
                }
                if (source_errors.contains(key)) throw error(source_errors.at(key));
                build.embeddings = &sources.at(key);
            }
            ix.emplace(retrieval::index::build(corpus, stops, spec, build));
        } catch (const std::exception& e) {
            report.error = e.what();
        }

        report.outcomes.resize(jobs.size());
        detail::parallel_for(jobs.size(), opts.jobs, [&](std::size_t i) {
            auto& o = report.outcomes[i];
            o.trial_id = jobs[i].t->id;
            o.query_number = jobs[i].number;
            o.target = jobs[i].t->target;
            if (!ix) {
                o.note = "backend unavailable";
                return;
            }
            try {
                const auto r = ix->rank_tokens(jobs[i].tokens, opts.k);
                o.dropped_tokens = r.dropped_tokens;
                for (std::size_t pos = 0; pos < r.hits.size(); ++pos)
                    if (r.hits[pos].id == o.target) {
                        o.rank = pos + 1;
                        break;
                    }
            } catch (const std::exception& e) {
                o.note = e.what();
            }
        });
        reports.push_back(std::move(report));
    }
    return reports;
}

/// backend,hits@1,hits@2,hits@3,hits@20 with each cell "count (pct%)".
inline std::string format_csv(const std::vector<backend_report>& reports) {
    std::string out = "backend";
    for (auto k : report_cutoffs) out += ",hits@" + std::to_string(k);
    out += '\n';
    for (const auto& r : reports) {
        out += detail::csv_field(r.backend);
        for (auto k : report_cutoffs) out += "," + r.hits(k).str();
        out += '\n';
    }
    return out;
}

/// The same table with aligned columns, followed by totals and any errors.
inline std::string format_table(const std::vector<backend_report>& reports) {
    std::vector<std::vector<std::string>> rows{{"backend"}};
    for (auto k : report_cutoffs) rows[0].push_back("hits@" + std::to_string(k));
    for (const auto& r : reports) {
        std::vector<std::string> row{r.backend};
        for (auto k : report_cutoffs) row.push_back(r.hits(k).str());
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            out += rows[i][c];
            if (c + 1 < rows[i].size()) out += std::string(width[c] - rows[i][c].size() + 2, ' ');
        }
        out += '\n';
        if (i == 0) {
            std::size_t total = 0;
            for (auto w : width) total += w + 2;
            out += std::string(total - 2, '-') + '\n';
        }
    }
    if (!reports.empty()) out += "\nqueries: " + std::to_string(reports.front().outcomes.size()) + '\n';
    for (const auto& r : reports)
        if (!r.error.empty()) out += r.backend + ": " + r.error + '\n';
    return out;
}

/// One row per backend and query: where the target ranked, or "miss".
inline std::string format_ranks_csv(const std::vector<backend_report>& reports) {
    std::string out = "backend,trial,query,target,rank,dropped_tokens,note\n";
    for (const auto& r : reports)
        for (const auto& o : r.outcomes) {
            out += detail::csv_field(r.backend) + "," + detail::csv_field(o.trial_id) + "," +
                   std::to_string(o.query_number) + "," + std::to_string(o.target) + "," +
                   (o.rank ? std::to_string(*o.rank) : std::string("miss")) + "," + std::to_string(o.dropped_tokens) +
                   "," + detail::csv_field(o.note) + "\n";
        }
    return out;
}

/// Writes report.csv, report.txt and ranks.csv into `dir`.
inline void write_reports(const std::filesystem::path& dir, const std::vector<backend_report>& reports) {
    std::filesystem::create_directories(dir);
    auto put = [&](const char* name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw error("cannot write " + (dir / name).string());
        out << text;
    };
    put("report.csv", format_csv(reports));
    put("report.txt", format_table(reports));
    put("ranks.csv", format_ranks_csv(reports));
}

}  // namespace semsearch::eval

#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semsearch/common/errors.hpp"
#include "semsearch/text/pipeline.hpp"
#include "semsearch/text/unicode.hpp"

namespace semsearch::eval {

/// One search trial: a target statement and the query variations that
/// should retrieve it. Query 1 is conventionally the target verbatim.
struct trial {
    std::string id;
    statement_id target = 0;
    std::vector<std::string> queries;
};

struct trial_set {
    std::vector<trial> trials;

    std::size_t query_count() const {
        std::size_t n = 0;
        for (const auto& t : trials) n += t.queries.size();
        return n;
    }
};

/// A trial as written in the file, before its target is resolved.
struct trial_record {
    std::string id;
    std::string target;
    std::vector<std::string> queries;
    std::size_t line = 0;
};

/// Parses the trial format:
///
///     # comment
///     trial <id>
///     target <statement text> | target #<statement id>
///     query <text>
///     query <text>
///
/// Blank lines are ignored. Each trial needs exactly one target and at least
/// one query.
inline std::vector<trial_record> parse_trials(std::string_view text) {
    std::vector<trial_record> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw format_error("trials line " + std::to_string(line_no) + ": " + msg);
    };
    auto finish = [&]() {
        if (out.empty()) return;
        const auto& t = out.back();
        if (t.target.empty()) throw format_error("trial '" + t.id + "' has no target");
        if (t.queries.empty()) throw format_error("trial '" + t.id + "' has no queries");
    };
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = unicode::trim_space(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        const auto space = line.find_first_of(" \t");
        const auto keyword = line.substr(0, space);
        const auto value = space == std::string_view::npos ? std::string_view{} : unicode::trim_space(line.substr(space));
        if (keyword == "trial") {
            if (value.empty()) fail("trial needs an id");
            finish();
            for (const auto& t : out)
                if (t.id == value) fail("duplicate trial id '" + std::string(value) + "'");
            out.push_back({std::string(value), {}, {}, line_no});
        } else if (keyword == "target" || keyword == "query") {
            if (out.empty()) fail(std::string(keyword) + " before any trial");
            if (value.empty()) fail(std::string(keyword) + " needs text");
            if (keyword == "query") {
                out.back().queries.emplace_back(value);
            } else {
                if (!out.back().target.empty()) fail("trial '" + out.back().id + "' has two targets");
                out.back().target = std::string(value);
            }
        } else {
            fail("unknown record '" + std::string(keyword) + "'");
        }
    }
    finish();
    if (out.empty()) throw format_error("trials file contains no trials");
    return out;
}

/// Targets resolve by `#id` or by exact match against a statement's raw text;
/// with duplicate statements the lowest id wins.
inline trial_set resolve_trials(const std::vector<trial_record>& records, const std::vector<statement>& corpus) {
    std::unordered_map<std::string_view, statement_id> by_text;
    std::unordered_set<statement_id> ids;
    for (const auto& s : corpus) {
        by_text.try_emplace(s.raw, s.id);
        ids.insert(s.id);
    }
    trial_set set;
    for (const auto& r : records) {
        trial t{r.id, 0, r.queries};
        if (r.target.size() > 1 && r.target.front() == '#') {
            std::size_t id = 0;
            const auto digits = std::string_view(r.target).substr(1);
            const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
            if (ec != std::errc{} || end != digits.data() + digits.size() || !ids.contains(id))
                throw error("trial '" + r.id + "': no statement with id " + std::string(digits));
            t.target = id;
        } else {
            const auto it = by_text.find(r.target);
            if (it == by_text.end()) throw error("trial '" + r.id + "': target text matches no statement");
            t.target = it->second;
        }
        set.trials.push_back(std::move(t));
    }
    return set;
}

inline trial_set load_trials(const std::string& path, const std::vector<statement>& corpus) {
    return resolve_trials(parse_trials(read_file(path)), corpus);
}

}  // namespace semsearch::eval

#include "scud/selector.hpp"

#include <algorithm>
#include <set>

namespace scud {

namespace {

struct Candidate {
    const PoolEntry* entry;
    int doc_id;
    const std::vector<std::string>* tokens;  // index.doc_tokens[doc_id]

    bool has_token(const std::string& t) const {
        return std::find(tokens->begin(), tokens->end(), t) != tokens->end();
    }
};

void check_alignment(const Pool& pool, const Bm25Index& index) {
    if (index.doc_count != static_cast<int>(pool.entries.size()))
        throw Error("BM25 index covers " + std::to_string(index.doc_count) +
                    " documents but the pool has " + std::to_string(pool.entries.size()));
}

SelectionResult select_greedy(const Pool& pool, const std::string& x0, int M, std::uint64_t seed,
                              const Bm25Index& index, bool wholes_only,
                              const std::string& strategy) {
    if (pool.entries.empty()) throw EmptyPool("selection over an empty pool");
    check_alignment(pool, index);

    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < pool.entries.size(); ++i) {
        const PoolEntry& e = pool.entries[i];
        if (wholes_only && e.kind != EntryKind::Whole) continue;
        candidates.push_back({&e, static_cast<int>(i), &index.doc_tokens[i]});
    }
    if (candidates.empty()) throw EmptyPool("pool has no whole entries");

    std::vector<std::string> query = tokenize(x0);
    std::set<std::string> token_set(query.begin(), query.end());
    std::vector<std::string> x0_tokens(token_set.begin(), token_set.end());  // sorted

    SelectionResult result;
    result.strategy = strategy;
    result.seed = seed;
    SplitMix64 rng(seed);

    std::set<std::string> covered;
    std::set<std::string> seen_templates;
    std::vector<const PoolEntry*> picked;
    std::set<const PoolEntry*> picked_set;

    auto valid = [&](const Candidate& c, const std::string& token) {
        if (picked_set.count(c.entry)) return false;
        for (const PoolEntry* s : picked) {
            if (s->origin_id != c.entry->origin_id) continue;
            if (is_ancestor(s->path, c.entry->path) || is_ancestor(c.entry->path, s->path))
                return false;
        }
        if (seen_templates.count(c.entry->anon_template)) return false;
        return c.has_token(token);
    };

    while (static_cast<int>(result.selected.size()) < M) {
        ++result.iterations;
        std::vector<std::string> promising;
        for (const std::string& tok : x0_tokens) {
            if (covered.count(tok)) continue;
            for (const Candidate& c : candidates) {
                if (valid(c, tok)) {
                    promising.push_back(tok);
                    break;
                }
            }
        }
        if (promising.empty()) {
            if (covered.empty()) break;
            covered.clear();
            ++result.reset_count;
            TrailStep step;
            step.reset = true;
            result.trail.push_back(step);
            continue;
        }
        const std::string& token = promising[rng.next() % promising.size()];

        const Candidate* best = nullptr;
        double best_score = 0.0;
        int count = 0;
        for (const Candidate& c : candidates) {
            if (!valid(c, token)) continue;
            ++count;
            double s = score(index, query, c.doc_id);
            if (best == nullptr || s > best_score ||
                (s == best_score && c.entry->id < best->entry->id)) {
                best = &c;
                best_score = s;
            }
        }

        result.selected.push_back(best->entry->id);
        TrailStep step;
        step.token = token;
        step.candidate_count = count;
        step.winner_id = best->entry->id;
        step.winner_score = best_score;
        result.trail.push_back(step);
        seen_templates.insert(best->entry->anon_template);
        covered.insert(token);
        picked.push_back(best->entry);
        picked_set.insert(best->entry);
    }
    return result;
}

}  // namespace

SelectionResult select_scud(const Pool& pool, const std::string& x0, int M, std::uint64_t seed,
                            const Bm25Index& index) {
    return select_greedy(pool, x0, M, seed, index, false, "scud");
}

SelectionResult select_whole(const Pool& pool, const std::string& x0, int M, std::uint64_t seed,
                             const Bm25Index& index) {
    return select_greedy(pool, x0, M, seed, index, true, "whole");
}

SelectionResult select_topk(const Pool& pool, const std::string& x0, int M,
                            const Bm25Index& index) {
    if (pool.entries.empty()) throw EmptyPool("selection over an empty pool");
    check_alignment(pool, index);

    std::vector<std::string> query = tokenize(x0);
    std::vector<std::pair<double, const PoolEntry*>> scored;
    for (std::size_t i = 0; i < pool.entries.size(); ++i)
        scored.emplace_back(score(index, query, static_cast<int>(i)), &pool.entries[i]);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->id < b.second->id;
    });

    SelectionResult result;
    result.strategy = "topk";
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(std::max(M, 0)),
                                             scored.size());
    for (std::size_t i = 0; i < take; ++i) {
        result.selected.push_back(scored[i].second->id);
        TrailStep step;
        step.candidate_count = static_cast<int>(scored.size());
        step.winner_id = scored[i].second->id;
        step.winner_score = scored[i].first;
        result.trail.push_back(step);
        ++result.iterations;
    }
    return result;
}

SelectionResult expand_to_whole(const SelectionResult& result, const Pool& pool) {
    SelectionResult out = result;
    out.selected.clear();
    std::set<std::string> kept;
    for (const std::string& id : result.selected) {
        const PoolEntry* e = pool.find(id);
        if (e == nullptr) throw MissingEntry("selection references unknown entry: " + id);
        std::string target = e->kind == EntryKind::Fragment ? e->origin_id : e->id;
        if (kept.insert(target).second) out.selected.push_back(target);
    }
    return out;
}

}  // namespace scud

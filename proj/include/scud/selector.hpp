#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scud/pool.hpp"
#include "scud/retrieval.hpp"

namespace scud {

// splitmix64. The constants are part of the interface: a reimplementation that
// seeds the same state and draws next() % n over the lexicographically sorted
// promising-token list reproduces every selection.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

struct TrailStep {
    bool reset = false;     // a coverage reset; all other fields are blank
    std::string token;      // drawn uncovered token
    int candidate_count = 0;  // valid candidates carrying that token
    std::string winner_id;
    double winner_score = 0.0;
};

struct SelectionResult {
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<std::string> selected;  // entry ids in pick order
    std::vector<TrailStep> trail;       // picks and resets, in loop order
    int iterations = 0;                 // greedy loop iterations, resets included
    int reset_count = 0;
};

// Greedy diverse selection over wholes and fragments. A candidate is valid for
// an uncovered token iff it is unselected, no selected entry of the same origin
// is a path ancestor/descendant, its anonymized template is unseen, and the
// token occurs in its utterance. The drawn token's BM25-argmax candidate wins
// (ties: smaller id). Empty promising set: reset coverage if any token was
// covered, otherwise stop.
SelectionResult select_scud(const Pool& pool, const std::string& x0, int M, std::uint64_t seed,
                            const Bm25Index& index);

// Same loop restricted to whole entries (the ancestor/descendant rule is then
// vacuous).
SelectionResult select_whole(const Pool& pool, const std::string& x0, int M, std::uint64_t seed,
                             const Bm25Index& index);

// Plain BM25 top-M, descending score, id tiebreak.
SelectionResult select_topk(const Pool& pool, const std::string& x0, int M,
                            const Bm25Index& index);

// Fragment ids replaced by their origin whole's id; duplicates collapse onto
// the first occurrence; the trail is kept as the audit of the original run.
SelectionResult expand_to_whole(const SelectionResult& result, const Pool& pool);

}  // namespace scud

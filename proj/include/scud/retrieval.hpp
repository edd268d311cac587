#pragma once

#include <map>
#include <string>
#include <vector>

#include "scud/errors.hpp"

namespace scud {

// Lowercases, splits on any non-alphanumeric character, drops empty pieces.
std::vector<std::string> tokenize(const std::string& text);

struct Bm25Index {
    std::vector<std::vector<std::string>> doc_tokens;
    std::map<std::string, int> doc_freq;
    double avg_doc_len = 0.0;
    double k1 = 1.2;
    double b = 0.75;
    int doc_count = 0;
};

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;

Bm25Index build_index(const std::vector<std::vector<std::string>>& docs, double k1 = kBm25K1,
                      double b = kBm25B);

// Okapi BM25 with IDF(t) = ln((N - df + 0.5)/(df + 0.5) + 1); summed over
// query token occurrences; terms with tf = 0 contribute nothing.
double score(const Bm25Index& index, const std::vector<std::string>& query, int doc_id);

}  // namespace scud

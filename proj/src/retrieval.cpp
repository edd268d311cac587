#include "scud/retrieval.hpp"

#include <cmath>
#include <set>

namespace scud {

namespace {

bool ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char ascii_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (ascii_alnum(c)) {
            cur += ascii_lower(c);
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

Bm25Index build_index(const std::vector<std::vector<std::string>>& docs, double k1, double b) {
    if (docs.empty()) throw EmptyCorpus("cannot build a BM25 index over zero documents");
    Bm25Index index;
    index.doc_tokens = docs;
    index.k1 = k1;
    index.b = b;
    index.doc_count = static_cast<int>(docs.size());
    std::size_t total = 0;
    for (const auto& doc : docs) {
        total += doc.size();
        std::set<std::string> seen(doc.begin(), doc.end());
        for (const std::string& t : seen) ++index.doc_freq[t];
    }
    index.avg_doc_len = static_cast<double>(total) / static_cast<double>(index.doc_count);
    return index;
}

double score(const Bm25Index& index, const std::vector<std::string>& query, int doc_id) {
    if (doc_id < 0 || doc_id >= index.doc_count)
        throw UnknownDoc("doc_id " + std::to_string(doc_id) + " outside corpus of " +
                         std::to_string(index.doc_count));
    const auto& doc = index.doc_tokens[static_cast<std::size_t>(doc_id)];
    double len = static_cast<double>(doc.size());
    double total = 0.0;
    for (const std::string& term : query) {
        std::size_t tf = 0;
        for (const std::string& t : doc) tf += t == term;
        if (tf == 0) continue;
        auto dfit = index.doc_freq.find(term);
        double df = dfit == index.doc_freq.end() ? 0.0 : dfit->second;
        double idf = std::log((index.doc_count - df + 0.5) / (df + 0.5) + 1.0);
        double tfd = static_cast<double>(tf);
        total += idf * tfd * (index.k1 + 1.0) /
                 (tfd + index.k1 * (1.0 - index.b + index.b * len / index.avg_doc_len));
    }
    return total;
}

}  // namespace scud

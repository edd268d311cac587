#pragma once

// Shared helpers for the unit and acceptance suites. The oracles here are
// deliberately independent reimplementations (plain recursion, naive O(n^2)
// loops) used to cross-check the library, so they must not call into it
// except where a signature is the thing under test.

#include <sys/wait.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scud/pool.hpp"
#include "scud/selector.hpp"

namespace support {

inline std::string data_dir() {
    const char* env = std::getenv("SCUD_DATA_DIR");
    return env != nullptr ? env : ".";
}

inline std::string cli_bin() {
    const char* env = std::getenv("SCUD_CLI_BIN");
    return env != nullptr ? env : "./scud";
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        for (int i = 0; i < 64; ++i) {
            auto candidate = base / ("scud_test_" + std::to_string(rng()));
            if (std::filesystem::create_directory(candidate)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

inline CliResult run_cli(const std::string& args) {
    CliResult result;
    std::string cmd = cli_bin() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return result;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
    int status = pclose(pipe);
    result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return result;
}

// ---------------------------------------------------------------------------
// Tree generation for property tests. Internal labels come from the toy
// vocabulary so template computation never trips the unknown-operator check.

inline scud::OperatorVocabulary toy_vocab() {
    scud::OperatorVocabulary vocab;
    for (const char* name : {"AND", "f", "g", "h", "k", "Today", "Noon"})
        vocab.operators.push_back({name, "", false});
    vocab.commutative.insert("AND");
    return vocab;
}

inline const std::vector<std::string>& internal_labels() {
    static const std::vector<std::string> labels = {"AND", "f", "g", "h", "k"};
    return labels;
}

inline const std::vector<std::string>& leaf_labels() {
    static const std::vector<std::string> labels = {"Today",  "Noon", "alpha", "bravo",
                                                    "charlie", "delta", "echo"};
    return labels;
}

inline scud::Node random_tree(std::mt19937_64& rng, int max_depth, int max_arity) {
    scud::Node node;
    bool leaf = max_depth <= 1 || (rng() % 100) < 25;
    if (leaf) {
        node.label = leaf_labels()[rng() % leaf_labels().size()];
        return node;
    }
    node.label = internal_labels()[rng() % internal_labels().size()];
    std::size_t arity = 1 + rng() % static_cast<std::size_t>(max_arity);
    for (std::size_t i = 0; i < arity; ++i)
        node.children.push_back(random_tree(rng, max_depth - 1, max_arity));
    return node;
}

inline int count_internal_oracle(const scud::Node& n) {
    if (n.children.empty()) return 0;
    int total = 1;
    for (const auto& c : n.children) total += count_internal_oracle(c);
    return total;
}

inline int depth_oracle(const scud::Node& n) {
    int best = 0;
    for (const auto& c : n.children) best = std::max(best, depth_oracle(c));
    return 1 + best;
}

// ---------------------------------------------------------------------------
// Independent BM25 reference (closed-form Okapi, +1-inside-log IDF).

inline std::vector<std::string> tokenize_oracle(const std::string& text) {
    std::vector<std::string> out;
    std::string run;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            run += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!run.empty()) {
            out.push_back(run);
            run.clear();
        }
    }
    if (!run.empty()) out.push_back(run);
    return out;
}

inline double bm25_reference(const std::vector<std::vector<std::string>>& docs,
                             const std::vector<std::string>& query, std::size_t doc_id,
                             double k1, double b) {
    double total_len = 0.0;
    for (const auto& d : docs) total_len += static_cast<double>(d.size());
    double avg = total_len / static_cast<double>(docs.size());
    double n_docs = static_cast<double>(docs.size());

    double result = 0.0;
    for (const std::string& term : query) {
        double df = 0.0;
        for (const auto& d : docs) {
            for (const auto& t : d) {
                if (t == term) {
                    df += 1.0;
                    break;
                }
            }
        }
        double tf = 0.0;
        for (const auto& t : docs[doc_id])
            if (t == term) tf += 1.0;
        if (tf == 0.0) continue;
        double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
        double len = static_cast<double>(docs[doc_id].size());
        result += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * len / avg));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Independent replay of a greedy selection run. Recomputes every iteration
// from scratch — promising tokens, candidate counts, winner and score, resets
// and the RNG draws — and compares against the recorded trail.

struct MiniEntry {
    std::string id;
    std::string origin;
    std::vector<int> path;
    std::vector<std::string> tokens;
    std::string anon_template;
};

struct ReplayOutcome {
    bool ok = true;
    std::string message;
};

inline bool prefix_of(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() >= b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

inline ReplayOutcome replay_selection(const std::vector<MiniEntry>& entries,
                                      const std::vector<std::vector<std::string>>& docs,
                                      const std::string& x0, int M, std::uint64_t seed,
                                      double k1, double b,
                                      const scud::SelectionResult& result) {
    auto fail = [](const std::string& msg) { return ReplayOutcome{false, msg}; };

    std::vector<std::string> query = tokenize_oracle(x0);
    std::set<std::string> token_set(query.begin(), query.end());
    std::vector<std::string> x0_tokens(token_set.begin(), token_set.end());

    std::uint64_t state = seed;
    auto next_draw = [&state]() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };

    std::set<std::string> covered;
    std::set<std::string> seen_templates;
    std::vector<std::size_t> picked;
    std::vector<std::string> selected;
    std::size_t step_idx = 0;
    int iterations = 0;
    int resets = 0;

    auto valid = [&](std::size_t idx, const std::string& token) {
        for (std::size_t p : picked) {
            if (p == idx) return false;
            if (entries[p].origin == entries[idx].origin &&
                (prefix_of(entries[p].path, entries[idx].path) ||
                 prefix_of(entries[idx].path, entries[p].path)))
                return false;
        }
        if (seen_templates.count(entries[idx].anon_template)) return false;
        for (const auto& t : entries[idx].tokens)
            if (t == token) return true;
        return false;
    };

    while (static_cast<int>(selected.size()) < M) {
        ++iterations;
        std::vector<std::string> promising;
        for (const std::string& tok : x0_tokens) {
            if (covered.count(tok)) continue;
            for (std::size_t i = 0; i < entries.size(); ++i) {
                if (valid(i, tok)) {
                    promising.push_back(tok);
                    break;
                }
            }
        }
        if (promising.empty()) {
            if (covered.empty()) break;
            covered.clear();
            ++resets;
            if (step_idx >= result.trail.size()) return fail("trail too short at reset");
            if (!result.trail[step_idx].reset)
                return fail("expected reset at step " + std::to_string(step_idx));
            ++step_idx;
            continue;
        }
        std::string token = promising[next_draw() % promising.size()];

        std::size_t best = entries.size();
        double best_score = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!valid(i, token)) continue;
            ++count;
            double s = bm25_reference(docs, query, i, k1, b);
            if (best == entries.size() || s > best_score ||
                (s == best_score && entries[i].id < entries[best].id)) {
                best = i;
                best_score = s;
            }
        }

        if (step_idx >= result.trail.size()) return fail("trail too short at pick");
        const scud::TrailStep& step = result.trail[step_idx];
        if (step.reset) return fail("unexpected reset at step " + std::to_string(step_idx));
        if (step.token != token)
            return fail("step " + std::to_string(step_idx) + ": token " + step.token +
                        " != oracle " + token);
        if (step.candidate_count != count)
            return fail("step " + std::to_string(step_idx) + ": candidate_count " +
                        std::to_string(step.candidate_count) + " != oracle " +
                        std::to_string(count));
        if (step.winner_id != entries[best].id)
            return fail("step " + std::to_string(step_idx) + ": winner " + step.winner_id +
                        " != oracle " + entries[best].id);
        if (std::abs(step.winner_score - best_score) > 1e-9)
            return fail("step " + std::to_string(step_idx) + ": score off by " +
                        std::to_string(step.winner_score - best_score));
        ++step_idx;

        selected.push_back(entries[best].id);
        covered.insert(token);
        seen_templates.insert(entries[best].anon_template);
        picked.push_back(best);
    }

    if (selected != result.selected) return fail("selected ids differ from oracle");
    if (step_idx != result.trail.size()) return fail("trail longer than oracle run");
    if (iterations != result.iterations)
        return fail("iterations " + std::to_string(result.iterations) + " != oracle " +
                    std::to_string(iterations));
    if (resets != result.reset_count)
        return fail("reset_count " + std::to_string(result.reset_count) + " != oracle " +
                    std::to_string(resets));
    return {};
}

// Bridges a real pool to the replay oracle.
inline std::vector<MiniEntry> mini_entries(const scud::Pool& pool) {
    std::vector<MiniEntry> out;
    for (const auto& e : pool.entries)
        out.push_back({e.id, e.origin_id, e.path, tokenize_oracle(e.utterance),
                       e.anon_template});
    return out;
}

}  // namespace support

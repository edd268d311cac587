#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scud/ast.hpp"

namespace scud {

// First parseable call-syntax span of raw LLM text: code fences stripped, then
// every '(' tried left-to-right with its label walked back to the nearest
// delimiter and the balanced span parsed; fence-free texts without '(' are
// tried whole as a bare leaf.
std::optional<Program> extract_program(const std::string& raw);

// Both sides parse (pred via extract_program) and canonical printings are
// byte-identical.
bool exact_match(const std::string& pred, const std::string& gold);

// Both sides parse and are equal up to commutative-child reordering — an
// execution-accuracy proxy, not true execution.
bool tree_match(const std::string& pred, const std::string& gold,
                const OperatorVocabulary& vocab);

struct DepthBucket {
    int n = 0;
    int exact = 0;
    int tree = 0;
};

struct EvalReport {
    int n = 0;
    double exact_match = 0.0;
    double tree_match = 0.0;  // commutativity-aware proxy for execution accuracy
    std::map<std::string, DepthBucket> by_depth;  // keys "1".."4" and "5+"
    int parse_failures = 0;
};

// Buckets by gold depth; golds must parse (GoldParseError carries the index).
EvalReport evaluate(const std::vector<std::pair<std::string, std::string>>& pairs,
                    const OperatorVocabulary& vocab);

std::string report_table(const EvalReport& report);

}  // namespace scud

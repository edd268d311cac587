#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scud/errors.hpp"

namespace scud {

// Call-syntax program tree: node := LABEL | LABEL '(' node (',' node)* ')'.
// Leaves are either entities (names, literals, multi-word strings) or
// zero-arity operators; only the vocabulary can tell them apart.
struct Node {
    std::string label;
    std::vector<Node> children;

    bool leaf() const { return children.empty(); }
};

using Program = Node;

// An operator line of the schema, or (when section is true) a group-comment
// line separating operator blocks in the rendered schema; sections have an
// empty name and are invisible to is_operator.
struct OperatorInfo {
    std::string name;
    std::string doc;
    bool section = false;
};

struct OperatorVocabulary {
    std::vector<OperatorInfo> operators;  // schema order, used when rendering prompts
    std::set<std::string> commutative;
    std::map<std::string, std::map<std::string, std::string>> rename_maps;

    bool is_operator(const std::string& label) const;
    bool is_commutative(const std::string& label) const;
    const std::map<std::string, std::string>& rename_map(const std::string& name) const;

    static OperatorVocabulary load(const std::string& path);
};

inline const std::string kAnonLabel = "ANON";

// Throws ParseError (with byte offset) on malformed input, including trailing text.
Program parse_program(const std::string& text);

// Canonical form: one space after '(' and each ',', one space before ')',
// e.g. "CreateEvent( AND( a, b ) )". Multi-word labels keep single inner spaces.
std::string print_program(const Node& node);

// Levels, counting the root: a bare leaf has depth 1.
int depth(const Node& node);

// Entity leaves (labels outside the vocabulary) become ANON; operator labels,
// including zero-arity operators, are preserved. Idempotent.
Node anonymize(const Node& node, const OperatorVocabulary& vocab);
std::string anon_template(const Node& node, const OperatorVocabulary& vocab);

// Children of commutative operators sorted recursively by canonical printed form.
Node normal_form(const Node& node, const OperatorVocabulary& vocab);

// Equality up to reordering children of commutative operators.
bool tree_equal(const Node& a, const Node& b, const OperatorVocabulary& vocab);

// Relabels every node found in the map; unmapped labels (entities, untranslated
// operators) pass through unchanged.
Node remap_operators(const Node& node, const std::map<std::string, std::string>& renames);

// Named-map variant; throws UnknownMap.
Node remap_operators(const Node& node, const std::string& map_name,
                     const OperatorVocabulary& vocab);

// Removes a leading ``` line (with optional language tag) and the matching
// closing fence; returns trimmed text. No fence → trimmed input.
std::string strip_code_fences(const std::string& text);

}  // namespace scud

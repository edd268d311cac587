#pragma once

#include <string>
#include <vector>

#include "scud/ast.hpp"

namespace scud {

// Child indices from the root; empty = root. For fragments born from an LLM
// decomposition the path is the node's position in the decomposition tree
// (the hierarchy Algorithm-style selection needs); fragments enumerated
// directly from the AST carry true AST paths.
using NodePath = std::vector<int>;

std::string path_to_string(const NodePath& path);  // dot-joined, "" for the root

// Strict prefix; equal paths are the same node, neither ancestor nor descendant.
bool is_ancestor(const NodePath& a, const NodePath& b);

// nullptr when the path leaves the tree.
const Node* subtree_at(const Node& root, const NodePath& path);

struct Subtree {
    NodePath path;
    Node program;
};

// One entry per internal (non-leaf) node except the root, pre-order.
std::vector<Subtree> enumerate_subtrees(const Node& p);

inline const std::string kLetLabel = "Let";

// Fragment programs for the same paths as enumerate_subtrees. When the root is
// a Let binder (>= 2 children: bindings..., body), fragments inside the body
// subtree get the bindings prepended so they stay self-contained.
std::vector<Subtree> enumerate_fragments(const Node& p);
Node fragment_program(const Node& whole, const NodePath& path);  // throws Error on bad path

struct DecompositionTree {
    std::string utterance;
    Node code;
    std::vector<DecompositionTree> children;
};

int decomposition_depth(const DecompositionTree& d);  // single node = 1

// Structural equality: utterances, codes, child order.
bool decomposition_equal(const DecompositionTree& a, const DecompositionTree& b);

// Accepts the assistant reply, code fences and surrounding whitespace included.
// Shape: { "<utterance>": { "code": "<program>", "decomposition": { ... } } }.
// Throws MalformedJson, MultipleRoots, MissingCodeField, UnparseableCode.
DecompositionTree parse_decomposition_json(const std::string& text);
std::string serialize_decomposition(const DecompositionTree& d);

// `code` embeds into `host`: equal labels match recursively (children of a
// commutative operator match an injective sub-multiset of the host's children,
// others positionwise with equal arity); a code node may also match a single
// child of a commutative host node, covering clause subsets that drop the
// wrapper when one clause remains.
bool embeds(const Node& code, const Node& host, const OperatorVocabulary& vocab);

// True iff `code` embeds at some node of `tree`.
bool contains_fragment(const Node& tree, const Node& code, const OperatorVocabulary& vocab);

enum class RejectReason { Containment, EmptyUtterance, DuplicateTemplate };

std::string reject_reason_name(RejectReason r);

struct NodeVerdict {
    NodePath path;  // position in the decomposition tree
    std::string utterance;
    bool accepted = true;
    std::vector<RejectReason> reasons;
};

struct ValidationReport {
    int accepted = 0;
    int rejected = 0;
    std::vector<NodeVerdict> nodes;  // pre-order, root first
};

// Flags, per node: code not contained in its parent's code (the root is checked
// against the original program), empty/whitespace utterance, duplicate
// anonymized template among siblings (first sibling keeps it). Never throws.
ValidationReport validate_decomposition(const Node& original_program, const DecompositionTree& d,
                                        const OperatorVocabulary& vocab);

}  // namespace scud

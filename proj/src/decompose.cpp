#include "scud/decompose.hpp"

#include <functional>
#include <set>

#include <nlohmann/json.hpp>

namespace scud {

std::string path_to_string(const NodePath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i != 0) out += '.';
        out += std::to_string(path[i]);
    }
    return out;
}

bool is_ancestor(const NodePath& a, const NodePath& b) {
    if (a.size() >= b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

const Node* subtree_at(const Node& root, const NodePath& path) {
    const Node* cur = &root;
    for (int idx : path) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= cur->children.size()) return nullptr;
        cur = &cur->children[idx];
    }
    return cur;
}

namespace {

void collect_subtrees(const Node& node, NodePath& path, std::vector<Subtree>& out) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& child = node.children[i];
        if (child.leaf()) continue;
        path.push_back(static_cast<int>(i));
        out.push_back({path, child});
        collect_subtrees(child, path, out);
        path.pop_back();
    }
}

bool let_rooted(const Node& p) { return p.label == kLetLabel && p.children.size() >= 2; }

Node let_wrap(const Node& whole, const Node& fragment) {
    Node wrapped;
    wrapped.label = kLetLabel;
    wrapped.children.assign(whole.children.begin(), whole.children.end() - 1);
    wrapped.children.push_back(fragment);
    return wrapped;
}

}  // namespace

std::vector<Subtree> enumerate_subtrees(const Node& p) {
    std::vector<Subtree> out;
    NodePath path;
    collect_subtrees(p, path, out);
    return out;
}

std::vector<Subtree> enumerate_fragments(const Node& p) {
    std::vector<Subtree> out = enumerate_subtrees(p);
    if (!let_rooted(p)) return out;
    int body_index = static_cast<int>(p.children.size()) - 1;
    for (Subtree& s : out)
        if (s.path.front() == body_index) s.program = let_wrap(p, s.program);
    return out;
}

Node fragment_program(const Node& whole, const NodePath& path) {
    const Node* sub = subtree_at(whole, path);
    if (sub == nullptr) throw Error("no subtree at path " + path_to_string(path));
    if (!path.empty() && let_rooted(whole) &&
        path.front() == static_cast<int>(whole.children.size()) - 1)
        return let_wrap(whole, *sub);
    return *sub;
}

int decomposition_depth(const DecompositionTree& d) {
    int best = 0;
    for (const DecompositionTree& child : d.children)
        best = std::max(best, decomposition_depth(child));
    return best + 1;
}

bool decomposition_equal(const DecompositionTree& a, const DecompositionTree& b) {
    if (a.utterance != b.utterance || print_program(a.code) != print_program(b.code) ||
        a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!decomposition_equal(a.children[i], b.children[i])) return false;
    return true;
}

namespace {

using ordered_json = nlohmann::ordered_json;

DecompositionTree tree_from_json(const std::string& utterance, const ordered_json& value,
                                 const std::string& where) {
    if (!value.is_object())
        throw MalformedJson(where + ": node value must be an object");
    if (!value.contains("code") || !value["code"].is_string())
        throw MissingCodeField(where + ": missing string \"code\"");
    DecompositionTree node;
    node.utterance = utterance;
    try {
        node.code = parse_program(value["code"].get<std::string>());
    } catch (const ParseError& e) {
        throw UnparseableCode(where + ": " + e.what());
    }
    if (value.contains("decomposition")) {
        const ordered_json& sub = value["decomposition"];
        if (!sub.is_object())
            throw MalformedJson(where + ": \"decomposition\" must be an object");
        for (const auto& [key, child] : sub.items())
            node.children.push_back(tree_from_json(key, child, where + "/" + key));
    }
    return node;
}

ordered_json tree_to_json(const DecompositionTree& d) {
    ordered_json value;
    value["code"] = print_program(d.code);
    if (!d.children.empty()) {
        ordered_json sub = ordered_json::object();
        for (const DecompositionTree& child : d.children) sub[child.utterance] = tree_to_json(child);
        value["decomposition"] = sub;
    }
    return value;
}

}  // namespace

DecompositionTree parse_decomposition_json(const std::string& text) {
    std::string body = strip_code_fences(text);
    ordered_json doc;
    try {
        doc = ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(std::string("decomposition reply: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedJson("decomposition reply: top level must be an object");
    if (doc.size() != 1)
        throw MultipleRoots("decomposition reply: expected exactly 1 top-level utterance, got " +
                            std::to_string(doc.size()));
    const auto& item = doc.items().begin();
    return tree_from_json(item.key(), item.value(), "/" + item.key());
}

std::string serialize_decomposition(const DecompositionTree& d) {
    ordered_json doc = ordered_json::object();
    doc[d.utterance] = tree_to_json(d);
    return doc.dump(2);
}

namespace {

bool injective_match(const std::vector<Node>& needles, const std::vector<Node>& hay,
                     const OperatorVocabulary& vocab) {
    std::vector<bool> used(hay.size(), false);
    std::function<bool(std::size_t)> place = [&](std::size_t i) {
        if (i == needles.size()) return true;
        for (std::size_t j = 0; j < hay.size(); ++j) {
            if (used[j] || !embeds(needles[i], hay[j], vocab)) continue;
            used[j] = true;
            if (place(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return place(0);
}

}  // namespace

bool embeds(const Node& code, const Node& host, const OperatorVocabulary& vocab) {
    if (code.label == host.label) {
        if (vocab.is_commutative(code.label)) {
            if (code.children.size() > host.children.size()) return false;
            return injective_match(code.children, host.children, vocab);
        }
        if (code.children.size() != host.children.size()) return false;
        for (std::size_t i = 0; i < code.children.size(); ++i)
            if (!embeds(code.children[i], host.children[i], vocab)) return false;
        return true;
    }
    if (vocab.is_commutative(host.label)) {
        for (const Node& child : host.children)
            if (embeds(code, child, vocab)) return true;
    }
    return false;
}

bool contains_fragment(const Node& tree, const Node& code, const OperatorVocabulary& vocab) {
    if (embeds(code, tree, vocab)) return true;
    for (const Node& child : tree.children)
        if (contains_fragment(child, code, vocab)) return true;
    return false;
}

std::string reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::Containment: return "containment";
        case RejectReason::EmptyUtterance: return "empty-utterance";
        case RejectReason::DuplicateTemplate: return "duplicate-template";
    }
    return "unknown";
}

namespace {

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

void validate_node(const DecompositionTree& node, const Node& parent_code, NodePath& path,
                   bool template_duplicated, const OperatorVocabulary& vocab,
                   ValidationReport& report) {
    NodeVerdict verdict;
    verdict.path = path;
    verdict.utterance = node.utterance;
    if (!contains_fragment(parent_code, node.code, vocab))
        verdict.reasons.push_back(RejectReason::Containment);
    if (blank(node.utterance)) verdict.reasons.push_back(RejectReason::EmptyUtterance);
    if (template_duplicated) verdict.reasons.push_back(RejectReason::DuplicateTemplate);
    verdict.accepted = verdict.reasons.empty();
    (verdict.accepted ? report.accepted : report.rejected) += 1;
    report.nodes.push_back(verdict);

    std::set<std::string> sibling_templates;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const DecompositionTree& child = node.children[i];
        bool duplicated = !sibling_templates.insert(anon_template(child.code, vocab)).second;
        path.push_back(static_cast<int>(i));
        validate_node(child, node.code, path, duplicated, vocab, report);
        path.pop_back();
    }
}

}  // namespace

ValidationReport validate_decomposition(const Node& original_program, const DecompositionTree& d,
                                        const OperatorVocabulary& vocab) {
    ValidationReport report;
    NodePath path;
    validate_node(d, original_program, path, false, vocab, report);
    return report;
}

}  // namespace scud

#include "scud/ast.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace scud {

namespace {

bool label_char(char c) { return c != '(' && c != ')' && c != ','; }

bool space_char(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Trims and collapses internal whitespace runs to single spaces.
std::string normalize_label(const std::string& raw) {
    std::string out;
    bool pending_space = false;
    for (char c : raw) {
        if (space_char(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() && space_char(text[pos])) ++pos;
    }

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }

    Node parse_node() {
        std::size_t label_start = pos;
        std::string raw;
        while (pos < text.size() && label_char(text[pos])) raw += text[pos++];
        Node node;
        node.label = normalize_label(raw);
        if (node.label.empty()) throw ParseError("expected a label", label_start);
        if (peek() != '(') return node;
        ++pos;  // '('
        while (true) {
            node.children.push_back(parse_node());
            skip_space();
            if (peek() == ',') {
                ++pos;
                continue;
            }
            if (peek() == ')') {
                ++pos;
                return node;
            }
            throw ParseError("expected ',' or ')'", pos);
        }
    }
};

}  // namespace

Program parse_program(const std::string& text) {
    Parser p{text};
    p.skip_space();
    if (p.pos == text.size()) throw ParseError("empty program", 0);
    Node root = p.parse_node();
    p.skip_space();
    if (p.pos != text.size()) throw ParseError("trailing characters after program", p.pos);
    return root;
}

std::string print_program(const Node& node) {
    if (node.leaf()) return node.label;
    std::string out = node.label + "( ";
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i != 0) out += ", ";
        out += print_program(node.children[i]);
    }
    out += " )";
    return out;
}

int depth(const Node& node) {
    int best = 0;
    for (const Node& child : node.children) best = std::max(best, depth(child));
    return best + 1;
}

Node anonymize(const Node& node, const OperatorVocabulary& vocab) {
    if (!node.leaf() && !vocab.is_operator(node.label))
        throw UnknownInternalOperator("internal operator not in vocabulary: " + node.label);
    Node out;
    out.label = (node.leaf() && !vocab.is_operator(node.label)) ? kAnonLabel : node.label;
    out.children.reserve(node.children.size());
    for (const Node& child : node.children) out.children.push_back(anonymize(child, vocab));
    return out;
}

std::string anon_template(const Node& node, const OperatorVocabulary& vocab) {
    return print_program(anonymize(node, vocab));
}

Node normal_form(const Node& node, const OperatorVocabulary& vocab) {
    Node out;
    out.label = node.label;
    out.children.reserve(node.children.size());
    for (const Node& child : node.children) out.children.push_back(normal_form(child, vocab));
    if (!out.children.empty() && vocab.is_commutative(out.label)) {
        std::sort(out.children.begin(), out.children.end(), [](const Node& a, const Node& b) {
            return print_program(a) < print_program(b);
        });
    }
    return out;
}

namespace {

bool structurally_equal(const Node& a, const Node& b) {
    if (a.label != b.label || a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    return true;
}

}  // namespace

bool tree_equal(const Node& a, const Node& b, const OperatorVocabulary& vocab) {
    return structurally_equal(normal_form(a, vocab), normal_form(b, vocab));
}

Node remap_operators(const Node& node, const std::map<std::string, std::string>& renames) {
    Node out;
    auto it = renames.find(node.label);
    out.label = it == renames.end() ? node.label : it->second;
    out.children.reserve(node.children.size());
    for (const Node& child : node.children) out.children.push_back(remap_operators(child, renames));
    return out;
}

Node remap_operators(const Node& node, const std::string& map_name,
                     const OperatorVocabulary& vocab) {
    auto it = vocab.rename_maps.find(map_name);
    if (it == vocab.rename_maps.end()) throw UnknownMap("unknown rename map: " + map_name);
    return remap_operators(node, it->second);
}

std::string strip_code_fences(const std::string& text) {
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return std::string();
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    };
    std::string body = trim(text);
    if (body.rfind("```", 0) != 0) return body;
    std::size_t line_end = body.find('\n');
    if (line_end == std::string::npos) return std::string();
    std::size_t close = body.rfind("```");
    if (close <= line_end) return trim(body.substr(line_end + 1));
    return trim(body.substr(line_end + 1, close - line_end - 1));
}

bool OperatorVocabulary::is_operator(const std::string& label) const {
    return std::any_of(operators.begin(), operators.end(), [&](const OperatorInfo& op) {
        return !op.section && op.name == label;
    });
}

bool OperatorVocabulary::is_commutative(const std::string& label) const {
    return commutative.count(label) != 0;
}

const std::map<std::string, std::string>& OperatorVocabulary::rename_map(
    const std::string& name) const {
    auto it = rename_maps.find(name);
    if (it == rename_maps.end()) throw UnknownMap("unknown rename map: " + name);
    return it->second;
}

OperatorVocabulary OperatorVocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("vocabulary " + path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("operators") || !doc["operators"].is_array())
        throw DataError("vocabulary " + path + ": expected an object with an \"operators\" array");

    OperatorVocabulary vocab;
    for (const auto& entry : doc["operators"]) {
        OperatorInfo info;
        if (entry.is_object() && entry.contains("section") && entry["section"].is_string()) {
            info.section = true;
            info.doc = entry["section"].get<std::string>();
        } else if (entry.is_object() && entry.contains("name") && entry["name"].is_string()) {
            info.name = entry["name"].get<std::string>();
            if (entry.contains("doc")) info.doc = entry["doc"].get<std::string>();
        } else {
            throw DataError("vocabulary " + path +
                            ": every item needs a string \"name\" or \"section\"");
        }
        vocab.operators.push_back(std::move(info));
    }
    if (doc.contains("commutative")) {
        for (const auto& name : doc["commutative"]) {
            if (!name.is_string())
                throw DataError("vocabulary " + path + ": \"commutative\" must list operator names");
            vocab.commutative.insert(name.get<std::string>());
        }
    }
    if (doc.contains("rename_maps")) {
        for (const auto& [lang, table] : doc["rename_maps"].items()) {
            if (!table.is_object())
                throw DataError("vocabulary " + path + ": rename map \"" + lang +
                                "\" must be an object");
            std::map<std::string, std::string> renames;
            for (const auto& [from, to] : table.items()) {
                if (!to.is_string())
                    throw DataError("vocabulary " + path + ": rename map \"" + lang +
                                    "\" values must be strings");
                renames[from] = to.get<std::string>();
            }
            vocab.rename_maps[lang] = std::move(renames);
        }
    }
    return vocab;
}

}  // namespace scud

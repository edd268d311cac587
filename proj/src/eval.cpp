#include "scud/eval.hpp"

#include <cstdio>

namespace scud {

namespace {

bool delimiter(char c) {
    return c == '(' || c == ')' || c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

}  // namespace

std::optional<Program> extract_program(const std::string& raw) {
    std::string text = strip_code_fences(raw);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '(') continue;
        std::size_t start = i;
        while (start > 0 && !delimiter(text[start - 1])) --start;
        if (start == i) continue;
        int open = 0;
        std::size_t end = i;
        for (; end < text.size(); ++end) {
            if (text[end] == '(') ++open;
            if (text[end] == ')' && --open == 0) {
                ++end;
                break;
            }
        }
        if (open != 0) continue;
        try {
            return parse_program(text.substr(start, end - start));
        } catch (const ParseError&) {
        }
    }
    if (text.find('(') == std::string::npos) {
        try {
            return parse_program(text);
        } catch (const ParseError&) {
        }
    }
    return std::nullopt;
}

bool exact_match(const std::string& pred, const std::string& gold) {
    std::optional<Program> p = extract_program(pred);
    std::optional<Program> g = extract_program(gold);
    if (!p || !g) return false;
    return print_program(*p) == print_program(*g);
}

bool tree_match(const std::string& pred, const std::string& gold,
                const OperatorVocabulary& vocab) {
    std::optional<Program> p = extract_program(pred);
    std::optional<Program> g = extract_program(gold);
    if (!p || !g) return false;
    return tree_equal(*p, *g, vocab);
}

EvalReport evaluate(const std::vector<std::pair<std::string, std::string>>& pairs,
                    const OperatorVocabulary& vocab) {
    EvalReport report;
    report.n = static_cast<int>(pairs.size());
    int exact_total = 0;
    int tree_total = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Program gold;
        try {
            gold = parse_program(pairs[i].second);
        } catch (const ParseError& e) {
            throw GoldParseError("pair " + std::to_string(i) + ": gold does not parse: " +
                                 e.what());
        }
        int gold_depth = depth(gold);
        std::string bucket = gold_depth >= 5 ? "5+" : std::to_string(gold_depth);

        std::optional<Program> pred = extract_program(pairs[i].first);
        bool em = false;
        bool tm = false;
        if (!pred) {
            ++report.parse_failures;
        } else {
            em = print_program(*pred) == print_program(gold);
            tm = tree_equal(*pred, gold, vocab);
        }
        DepthBucket& b = report.by_depth[bucket];
        ++b.n;
        b.exact += em;
        b.tree += tm;
        exact_total += em;
        tree_total += tm;
    }
    if (report.n > 0) {
        report.exact_match = static_cast<double>(exact_total) / report.n;
        report.tree_match = static_cast<double>(tree_total) / report.n;
    }
    return report;
}

std::string report_table(const EvalReport& report) {
    char line[128];
    std::string out;
    out += "depth      n   exact_match    tree_match\n";
    for (const auto& [bucket, stats] : report.by_depth) {
        double em = stats.n ? static_cast<double>(stats.exact) / stats.n : 0.0;
        double tm = stats.n ? static_cast<double>(stats.tree) / stats.n : 0.0;
        std::snprintf(line, sizeof line, "%-6s %6d %13.3f %13.3f\n", bucket.c_str(), stats.n, em,
                      tm);
        out += line;
    }
    std::snprintf(line, sizeof line, "%-6s %6d %13.3f %13.3f\n", "all", report.n,
                  report.exact_match, report.tree_match);
    out += line;
    std::snprintf(line, sizeof line, "parse failures: %d\n", report.parse_failures);
    out += line;
    out += "tree_match is a commutativity-aware proxy for execution accuracy\n";
    return out;
}

}  // namespace scud

#include "scud/prompting.hpp"

#include <filesystem>
#include <fstream>

namespace scud {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::size_t count_slot(const std::string& text, const std::string& slot) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(slot); pos != std::string::npos;
         pos = text.find(slot, pos + slot.size()))
        ++count;
    return count;
}

void require_slot(const std::string& text, const std::string& slot, const std::string& file) {
    std::size_t n = count_slot(text, slot);
    if (n != 1)
        throw MissingSlot(file + ": slot " + slot + " must appear exactly once, found " +
                          std::to_string(n));
}

std::string fill(std::string text, const std::string& slot, const std::string& value) {
    std::size_t pos = text.find(slot);
    text.replace(pos, slot.size(), value);
    return text;
}

}  // namespace

PromptTemplate PromptTemplate::load(const std::string& dir) {
    namespace fs = std::filesystem;
    PromptTemplate t;
    t.instruction_header = read_file((fs::path(dir) / "header.txt").string());
    t.ice_format = read_file((fs::path(dir) / "ice.txt").string());
    t.query_format = read_file((fs::path(dir) / "query.txt").string());
    require_slot(t.instruction_header, "{operators}", "header.txt");
    require_slot(t.ice_format, "{utterance}", "ice.txt");
    require_slot(t.ice_format, "{program}", "ice.txt");
    require_slot(t.query_format, "{utterance}", "query.txt");
    return t;
}

namespace {

bool name_char(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

std::string rename_in_text(const std::string& text,
                           const std::map<std::string, std::string>& renames) {
    std::string out;
    std::string run;
    auto flush = [&] {
        if (run.empty()) return;
        auto it = renames.find(run);
        out += it == renames.end() ? run : it->second;
        run.clear();
    };
    for (char c : text) {
        if (name_char(c)) {
            run += c;
        } else {
            flush();
            out += c;
        }
    }
    flush();
    return out;
}

}  // namespace

std::string render_operator_schema(const OperatorVocabulary& vocab,
                                   const std::map<std::string, std::string>* renames) {
    std::vector<std::string> lines;
    for (const OperatorInfo& op : vocab.operators) {
        if (op.section) {
            if (!lines.empty()) lines.push_back("");
            if (!op.doc.empty()) {
                std::string text =
                    renames == nullptr ? op.doc : rename_in_text(op.doc, *renames);
                lines.push_back("# " + text);
            }
            continue;
        }
        std::string name = op.name;
        std::string doc = op.doc;
        if (renames != nullptr) {
            auto it = renames->find(name);
            if (it != renames->end()) name = it->second;
            doc = rename_in_text(doc, *renames);
        }
        lines.push_back(doc.empty() ? name : name + "  # " + doc);
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i != 0) out += '\n';
        out += lines[i];
    }
    return out;
}

std::vector<ChatMessage> build_parse_prompt(const PromptTemplate& tmpl,
                                            const std::vector<PoolEntry>& ices,
                                            const std::string& x0,
                                            const OperatorVocabulary& vocab,
                                            const std::string& map_name) {
    const std::map<std::string, std::string>* renames = nullptr;
    if (!map_name.empty()) renames = &vocab.rename_map(map_name);

    std::string header =
        fill(tmpl.instruction_header, "{operators}", render_operator_schema(vocab, renames));

    std::string user;
    for (const PoolEntry& ice : ices) {
        Node program = renames == nullptr ? ice.program : remap_operators(ice.program, *renames);
        std::string block = fill(tmpl.ice_format, "{utterance}", ice.utterance);
        block = fill(block, "{program}", print_program(program));
        user += block;
        user += "\n\n";
    }
    user += fill(tmpl.query_format, "{utterance}", x0);

    return {{"system", header}, {"user", user}};
}

std::string flatten_prompt(const std::vector<ChatMessage>& messages) {
    std::string out;
    for (const ChatMessage& m : messages) {
        out += "### " + m.role + "\n";
        out += m.content;
        out += "\n\n";
    }
    return out;
}

}  // namespace scud

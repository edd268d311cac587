#pragma once

#include <map>
#include <string>
#include <vector>

#include "scud/llm.hpp"
#include "scud/pool.hpp"

namespace scud {

// Loaded from header.txt ({operators} slot), ice.txt ({utterance} and
// {program}), query.txt ({utterance}); every slot exactly once.
struct PromptTemplate {
    std::string instruction_header;
    std::string ice_format;
    std::string query_format;

    static PromptTemplate load(const std::string& dir);  // throws MissingSlot
};

// Schema block in the figure layout: "name  # doc" lines, bare names, and
// section comments as a blank line plus "# text". Operator names — in lines
// and inside section text — go through the rename map when one is given.
std::string render_operator_schema(const OperatorVocabulary& vocab,
                                   const std::map<std::string, std::string>* renames);

// System message = header with the rendered schema; one user message = ICE
// blocks in the given order, then the query block, blank-line separated.
// Programs are canonically printed, remapped when map_name is non-empty.
std::vector<ChatMessage> build_parse_prompt(const PromptTemplate& tmpl,
                                            const std::vector<PoolEntry>& ices,
                                            const std::string& x0,
                                            const OperatorVocabulary& vocab,
                                            const std::string& map_name = "");

std::string flatten_prompt(const std::vector<ChatMessage>& messages);

}  // namespace scud

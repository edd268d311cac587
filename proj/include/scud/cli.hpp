#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scud/llm.hpp"
#include "scud/retrieval.hpp"

namespace scud {

struct RunConfig {
    std::string pool_path;
    std::string vocab_path;
    std::string template_path;            // parse-prompt template directory
    std::string decompose_template_path;  // decomposition template directory
    std::string few_shot_path;            // subsumed-mode few-shot file
    double k1 = kBm25K1;
    double b = kBm25B;
    int budget = 5;
    std::uint64_t seed = 0;
    int min_depth = 1;
    std::string strategy = "scud";  // scud | whole | topk
    std::string mode = "subsumed";  // subsumed | independent
    ProviderConfig provider;
    std::string rename_map;  // empty = EN schema as stored
    std::string ice_order = "selection";  // selection | reverse
    bool expand_whole = false;
    bool strict = false;
    bool keep_invalid = false;
};

// Each command returns a process exit code (0 = success) or throws; main maps
// exceptions to exit codes (1 usage/config, 2 data, 3 provider).
int cmd_decompose(const RunConfig& cfg, const std::string& out_pool,
                  const std::string& audit_path);
int cmd_select(const RunConfig& cfg, const std::vector<std::string>& utterances,
               const std::string& out_path);
int cmd_prompt(const RunConfig& cfg, const std::string& selection_path,
               const std::string& out_path);
int cmd_eval(const RunConfig& cfg, const std::string& predictions_path,
             const std::string& golds_path, const std::string& out_path);
int cmd_stats(const RunConfig& cfg);
int cmd_infer(const RunConfig& cfg, const std::string& prompts_path, const std::string& out_path);

}  // namespace scud

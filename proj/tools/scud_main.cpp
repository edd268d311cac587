#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scud/cli.hpp"

namespace {

std::vector<std::string> read_utterance_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scud::IoError("cannot open test file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scud: fragment pools, diverse example selection, prompts, scoring"};
    app.fallthrough(true);
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; command-line flags override its values");
    // Keep dotted keys like `bm25.k1` as literal option names instead of
    // treating the dot as a section separator.
    app.get_config_formatter_base()->parentSeparator('\x1f');

    scud::RunConfig cfg;
    app.add_option("--pool", cfg.pool_path, "example pool (JSONL)");
    app.add_option("--vocab", cfg.vocab_path, "operator vocabulary (JSON)");
    app.add_option("--template", cfg.template_path, "parse prompt template directory");
    app.add_option("--decompose-template", cfg.decompose_template_path,
                   "decomposition template directory");
    app.add_option("--few-shots", cfg.few_shot_path,
                   "few-shot decomposition example (JSON), required in subsumed mode");
    app.add_option("-M,--budget", cfg.budget, "in-context example budget")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "seed for the token draw")->capture_default_str();
    app.add_option("--min-depth", cfg.min_depth,
                   "drop wholes (and their fragments) shallower than this")
        ->capture_default_str();
    app.add_option("--strategy", cfg.strategy, "selection strategy")
        ->capture_default_str()
        ->check(CLI::IsMember({"scud", "whole", "topk"}));
    app.add_option("--mode", cfg.mode, "decomposition mode")
        ->capture_default_str()
        ->check(CLI::IsMember({"subsumed", "independent"}));
    app.add_option("--rename-map", cfg.rename_map,
                   "render programs/schema through this operator rename map");
    app.add_option("--ice-order", cfg.ice_order, "in-context example order")
        ->capture_default_str()
        ->check(CLI::IsMember({"selection", "reverse"}));
    app.add_flag("--expand-whole", cfg.expand_whole,
                 "replace selected fragments with their origin wholes");
    app.add_flag("--strict", cfg.strict, "nonzero exit if any pool entry fails to decompose");
    app.add_flag("--keep-invalid", cfg.keep_invalid,
                 "keep fragments whose utterance is empty or template a duplicate");
    app.add_option("--bm25.k1", cfg.k1, "BM25 k1")->capture_default_str();
    app.add_option("--bm25.b", cfg.b, "BM25 b")->capture_default_str();
    app.add_option("--provider.endpoint", cfg.provider.endpoint_url,
                   "chat-completions URL, or mock:<fixture dir>");
    app.add_option("--provider.model", cfg.provider.model_name, "model name")
        ->capture_default_str();
    app.add_option("--provider.temperature", cfg.provider.temperature, "sampling temperature")
        ->capture_default_str();
    app.add_option("--provider.max-tokens", cfg.provider.max_output_tokens,
                   "completion token cap")
        ->capture_default_str();
    app.add_option("--provider.parallel", cfg.provider.max_parallel_requests,
                   "max in-flight requests")
        ->capture_default_str();
    app.add_option("--provider.retries", cfg.provider.retry_limit,
                   "extra attempts on transient failures")
        ->capture_default_str();

    std::string out_path;
    std::string audit_path;
    std::vector<std::string> x0s;
    std::string tests_path;
    std::string selection_path;
    std::string predictions_path;
    std::string golds_path;
    std::string prompts_path;

    CLI::App* decompose =
        app.add_subcommand("decompose", "generate aligned fragments for every whole");
    decompose->add_option("--out", out_path, "augmented pool output (JSONL)")->required();
    decompose->add_option("--audit", audit_path,
                          "audit log output (JSONL; default <out>.audit.jsonl)");

    CLI::App* select = app.add_subcommand("select", "pick in-context examples per utterance");
    select->add_option("--x0", x0s, "test utterance (repeatable)");
    select->add_option("--tests", tests_path, "file of test utterances, one per line");
    select->add_option("--out", out_path, "selection results output (JSON)")->required();

    CLI::App* prompt = app.add_subcommand("prompt", "assemble parse prompts from a selection");
    prompt->add_option("--selection", selection_path, "selection results (JSON)")->required();
    prompt->add_option("--out", out_path, "prompts output (JSON)")->required();

    CLI::App* eval = app.add_subcommand("eval", "score predictions against golds");
    eval->add_option("--predictions", predictions_path, "predictions (JSONL)")->required();
    eval->add_option("--golds", golds_path, "gold programs (JSONL)")->required();
    eval->add_option("--out", out_path, "report output (JSON; optional)");

    CLI::App* stats = app.add_subcommand("stats", "print pool composition");

    CLI::App* infer = app.add_subcommand("infer", "send prompts to the provider");
    infer->add_option("--prompts", prompts_path, "prompts (JSON, as written by prompt)")
        ->required();
    infer->add_option("--out", out_path, "predictions output (JSONL)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (decompose->parsed()) {
            if (audit_path.empty()) audit_path = out_path + ".audit.jsonl";
            return scud::cmd_decompose(cfg, out_path, audit_path);
        }
        if (select->parsed()) {
            std::vector<std::string> utterances = x0s;
            if (!tests_path.empty()) {
                auto lines = read_utterance_lines(tests_path);
                utterances.insert(utterances.end(), lines.begin(), lines.end());
            }
            return scud::cmd_select(cfg, utterances, out_path);
        }
        if (prompt->parsed()) return scud::cmd_prompt(cfg, selection_path, out_path);
        if (eval->parsed()) return scud::cmd_eval(cfg, predictions_path, golds_path, out_path);
        if (stats->parsed()) return scud::cmd_stats(cfg);
        if (infer->parsed()) return scud::cmd_infer(cfg, prompts_path, out_path);
    } catch (const scud::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const scud::ProviderError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const scud::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

#include "scud/cli.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "scud/eval.hpp"
#include "scud/prompting.hpp"
#include "scud/selector.hpp"

namespace scud {

namespace {

using ordered_json = nlohmann::ordered_json;

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

OperatorVocabulary load_vocab(const RunConfig& cfg) {
    require(!cfg.vocab_path.empty(), "missing --vocab");
    return OperatorVocabulary::load(cfg.vocab_path);
}

Pool load_pool_checked(const RunConfig& cfg, const OperatorVocabulary& vocab) {
    require(!cfg.pool_path.empty(), "missing --pool");
    Pool pool = load_pool(cfg.pool_path, vocab);
    if (cfg.min_depth > 1) pool = filter_by_depth(pool, cfg.min_depth);
    return pool;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    return out;
}

ordered_json messages_to_json(const std::vector<ChatMessage>& messages) {
    ordered_json arr = ordered_json::array();
    for (const ChatMessage& m : messages) {
        ordered_json one;
        one["role"] = m.role;
        one["content"] = m.content;
        arr.push_back(one);
    }
    return arr;
}

FewShot load_few_shot(const std::string& path, const OperatorVocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open few-shot file: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("few-shot file " + path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("utterance") || !doc.contains("program") ||
        !doc.contains("decomposition"))
        throw DataError("few-shot file " + path +
                        ": expected {utterance, program, decomposition}");
    FewShot shot;
    shot.entry = make_whole("fewshot", doc["utterance"].get<std::string>(),
                            parse_program(doc["program"].get<std::string>()), vocab);
    shot.tree = parse_decomposition_json(doc["decomposition"].dump());
    return shot;
}

ordered_json trail_to_json(const SelectionResult& result) {
    ordered_json trail = ordered_json::array();
    for (const TrailStep& step : result.trail) {
        ordered_json one;
        one["reset"] = step.reset;
        if (!step.reset) {
            one["token"] = step.token;
            one["candidate_count"] = step.candidate_count;
            one["winner_id"] = step.winner_id;
            one["winner_score"] = step.winner_score;
        }
        trail.push_back(one);
    }
    return trail;
}

}  // namespace

int cmd_decompose(const RunConfig& cfg, const std::string& out_pool,
                  const std::string& audit_path) {
    OperatorVocabulary vocab = load_vocab(cfg);
    Pool pool = load_pool_checked(cfg, vocab);
    require(!cfg.decompose_template_path.empty(), "missing --decompose-template");
    DecompositionTemplates templates = load_decomposition_templates(cfg.decompose_template_path);
    DecomposeMode mode = mode_from_name(cfg.mode);

    std::vector<FewShot> few_shots;
    if (mode == DecomposeMode::Subsumed) {
        require(!cfg.few_shot_path.empty(), "missing --few-shots (subsumed mode)");
        few_shots.push_back(load_few_shot(cfg.few_shot_path, vocab));
    }

    require(!cfg.provider.endpoint_url.empty(), "missing --provider.endpoint");
    std::unique_ptr<Provider> provider = make_provider(cfg.provider);

    std::ofstream audit = open_out(audit_path);
    std::vector<PoolEntry> all_fragments;
    int accepted = 0;
    int rejected = 0;
    int failed_entries = 0;
    bool provider_failure = false;

    for (const PoolEntry& entry : pool.entries) {
        if (entry.kind != EntryKind::Whole) continue;
        try {
            GenerateOutcome outcome =
                generate_fragments(entry, mode, *provider, vocab, templates, few_shots,
                                   cfg.keep_invalid);
            for (const AuditRecord& rec : outcome.audit) {
                ordered_json line;
                line["origin_id"] = rec.origin_id;
                line["mode"] = rec.mode;
                line["status"] = "ok";
                line["request"] = messages_to_json(rec.request);
                line["reply"] = rec.reply;
                line["fragments"] = rec.fragments;
                line["overlaps"] = rec.overlaps;
                audit << line.dump() << '\n';
            }
            accepted += outcome.validation.accepted;
            rejected += outcome.validation.rejected;
            all_fragments.insert(all_fragments.end(), outcome.fragments.begin(),
                                 outcome.fragments.end());
        } catch (const Error& e) {
            ++failed_entries;
            if (dynamic_cast<const ProviderError*>(&e) != nullptr) provider_failure = true;
            ordered_json line;
            line["origin_id"] = entry.id;
            line["mode"] = cfg.mode;
            line["status"] = "error";
            line["error"] = e.what();
            audit << line.dump() << '\n';
            std::cerr << "decompose: entry " << entry.id << " failed: " << e.what() << '\n';
        }
    }

    Pool augmented = augment(pool, all_fragments);
    save_pool(augmented, out_pool);

    PoolStats stats = pool_stats(augmented);
    std::cout << "wholes/fragments: " << stats.wholes << "/" << stats.fragments << '\n';
    if (mode == DecomposeMode::Subsumed)
        std::cout << "validation: accepted " << accepted << ", rejected " << rejected << '\n';
    if (failed_entries > 0) {
        std::cout << "failed entries: " << failed_entries << '\n';
        if (cfg.strict) return provider_failure ? 3 : 2;
    }
    return 0;
}

int cmd_select(const RunConfig& cfg, const std::vector<std::string>& utterances,
               const std::string& out_path) {
    OperatorVocabulary vocab = load_vocab(cfg);
    Pool pool = load_pool_checked(cfg, vocab);
    if (pool.entries.empty()) throw EmptyPool("pool is empty: " + cfg.pool_path);
    require(!utterances.empty(), "no test utterances: pass --x0 or --tests");
    require(cfg.strategy == "scud" || cfg.strategy == "whole" || cfg.strategy == "topk",
            "unknown --strategy: " + cfg.strategy);

    std::vector<std::vector<std::string>> docs;
    for (const PoolEntry& e : pool.entries) docs.push_back(tokenize(e.utterance));
    Bm25Index index = build_index(docs, cfg.k1, cfg.b);

    ordered_json out;
    out["strategy"] = cfg.strategy;
    out["seed"] = cfg.seed;
    out["budget"] = cfg.budget;
    out["expand_whole"] = cfg.expand_whole;
    out["results"] = ordered_json::array();

    for (const std::string& x0 : utterances) {
        SelectionResult result;
        if (cfg.strategy == "scud")
            result = select_scud(pool, x0, cfg.budget, cfg.seed, index);
        else if (cfg.strategy == "whole")
            result = select_whole(pool, x0, cfg.budget, cfg.seed, index);
        else
            result = select_topk(pool, x0, cfg.budget, index);
        if (cfg.expand_whole) result = expand_to_whole(result, pool);

        ordered_json one;
        one["x0"] = x0;
        one["selected"] = result.selected;
        one["iterations"] = result.iterations;
        one["reset_count"] = result.reset_count;
        one["trail"] = trail_to_json(result);
        out["results"].push_back(one);
    }

    open_out(out_path) << out.dump(2) << '\n';
    return 0;
}

int cmd_prompt(const RunConfig& cfg, const std::string& selection_path,
               const std::string& out_path) {
    OperatorVocabulary vocab = load_vocab(cfg);
    Pool pool = load_pool_checked(cfg, vocab);
    require(!cfg.template_path.empty(), "missing --template");
    PromptTemplate tmpl = PromptTemplate::load(cfg.template_path);
    require(cfg.ice_order == "selection" || cfg.ice_order == "reverse",
            "unknown --ice-order: " + cfg.ice_order);

    std::ifstream in(selection_path);
    if (!in) throw IoError("cannot open selection file: " + selection_path);
    ordered_json selections;
    try {
        selections = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("selection file " + selection_path + ": " + e.what());
    }
    if (!selections.is_object() || !selections.contains("results") ||
        !selections["results"].is_array())
        throw DataError("selection file " + selection_path + ": missing \"results\" array");

    ordered_json out;
    out["prompts"] = ordered_json::array();
    for (const auto& result : selections["results"]) {
        std::string x0 = result.at("x0").get<std::string>();
        std::vector<PoolEntry> ices;
        for (const auto& id : result.at("selected")) {
            const PoolEntry* e = pool.find(id.get<std::string>());
            if (e == nullptr)
                throw MissingEntry("selection references unknown entry: " +
                                   id.get<std::string>());
            ices.push_back(*e);
        }
        if (cfg.ice_order == "reverse") std::reverse(ices.begin(), ices.end());
        std::vector<ChatMessage> messages =
            build_parse_prompt(tmpl, ices, x0, vocab, cfg.rename_map);
        ordered_json one;
        one["x0"] = x0;
        one["messages"] = messages_to_json(messages);
        one["text"] = flatten_prompt(messages);
        out["prompts"].push_back(one);
    }

    open_out(out_path) << out.dump(2) << '\n';
    return 0;
}

namespace {

// JSONL rows holding `key` (plus optional "id"); returns (id, value) pairs.
std::vector<std::pair<std::string, std::string>> read_keyed_jsonl(const std::string& path,
                                                                  const std::string& key) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json doc;
        try {
            doc = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + " line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!doc.is_object() || !doc.contains(key) || !doc[key].is_string())
            throw DataError(path + " line " + std::to_string(line_no) + ": missing string \"" +
                            key + "\"");
        std::string id = doc.contains("id") && doc["id"].is_string()
                             ? doc["id"].get<std::string>()
                             : std::string();
        rows.emplace_back(id, doc[key].get<std::string>());
    }
    return rows;
}

}  // namespace

int cmd_eval(const RunConfig& cfg, const std::string& predictions_path,
             const std::string& golds_path, const std::string& out_path) {
    OperatorVocabulary vocab = load_vocab(cfg);
    auto preds = read_keyed_jsonl(predictions_path, "prediction");
    auto golds = read_keyed_jsonl(golds_path, "gold");

    bool all_ids = !preds.empty() && !golds.empty();
    for (const auto& [id, _] : preds) all_ids = all_ids && !id.empty();
    for (const auto& [id, _] : golds) all_ids = all_ids && !id.empty();

    std::vector<std::pair<std::string, std::string>> pairs;
    if (all_ids) {
        std::map<std::string, std::string> by_id;
        for (const auto& [id, text] : preds) by_id[id] = text;
        for (const auto& [id, gold] : golds) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw LengthMismatch("no prediction for gold id \"" + id + "\"");
            pairs.emplace_back(it->second, gold);
        }
    } else {
        if (preds.size() != golds.size())
            throw LengthMismatch("predictions/golds count differs: " +
                                 std::to_string(preds.size()) + " vs " +
                                 std::to_string(golds.size()));
        for (std::size_t i = 0; i < preds.size(); ++i)
            pairs.emplace_back(preds[i].second, golds[i].second);
    }

    EvalReport report = evaluate(pairs, vocab);
    std::cout << report_table(report);

    if (!out_path.empty()) {
        ordered_json doc;
        doc["n"] = report.n;
        doc["exact_match"] = report.exact_match;
        doc["tree_match"] = report.tree_match;
        doc["parse_failures"] = report.parse_failures;
        doc["by_depth"] = ordered_json::object();
        for (const auto& [bucket, stats] : report.by_depth) {
            ordered_json one;
            one["n"] = stats.n;
            one["exact_match"] = stats.n ? static_cast<double>(stats.exact) / stats.n : 0.0;
            one["tree_match"] = stats.n ? static_cast<double>(stats.tree) / stats.n : 0.0;
            doc["by_depth"][bucket] = one;
        }
        open_out(out_path) << doc.dump(2) << '\n';
    }
    return 0;
}

int cmd_stats(const RunConfig& cfg) {
    OperatorVocabulary vocab = load_vocab(cfg);
    Pool pool = load_pool_checked(cfg, vocab);
    PoolStats stats = pool_stats(pool);
    std::cout << "wholes/fragments: " << stats.wholes << "/" << stats.fragments << '\n';
    std::cout << "depth histogram (wholes):\n";
    for (const auto& [d, n] : stats.whole_depth_histogram)
        std::cout << "  " << d << ": " << n << '\n';
    return 0;
}

int cmd_infer(const RunConfig& cfg, const std::string& prompts_path,
              const std::string& out_path) {
    require(!cfg.provider.endpoint_url.empty(), "missing --provider.endpoint");
    std::unique_ptr<Provider> provider = make_provider(cfg.provider);

    std::ifstream in(prompts_path);
    if (!in) throw IoError("cannot open prompts file: " + prompts_path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("prompts file " + prompts_path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("prompts") || !doc["prompts"].is_array())
        throw DataError("prompts file " + prompts_path + ": missing \"prompts\" array");

    std::ofstream out = open_out(out_path);
    for (const auto& prompt : doc["prompts"]) {
        std::vector<ChatMessage> messages;
        for (const auto& m : prompt.at("messages"))
            messages.push_back(
                {m.at("role").get<std::string>(), m.at("content").get<std::string>()});
        std::string reply = provider->complete(messages);
        ordered_json line;
        line["x0"] = prompt.at("x0").get<std::string>();
        line["prediction"] = reply;
        out << line.dump() << '\n';
    }
    return 0;
}

}  // namespace scud

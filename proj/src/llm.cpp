#include "scud/llm.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "scud/retrieval.hpp"

namespace scud {

namespace fs = std::filesystem;

struct MockProvider::Gate {
    std::mutex m;
    std::condition_variable cv;
    int limit;
    int in_flight = 0;
    int max_observed = 0;
};

MockProvider::MockProvider(const std::string& fixture_dir, int max_parallel_requests,
                           int latency_ms)
    : gate_(std::make_shared<Gate>()), latency_ms_(latency_ms) {
    gate_->limit = std::max(1, max_parallel_requests);
    if (!fs::is_directory(fixture_dir))
        throw ProviderError("mock fixture directory not found: " + fixture_dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(fixture_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    for (const std::string& file : files) {
        std::ifstream in(file);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("mock fixture " + file + ": " + e.what());
        }
        if (!doc.is_object() || !doc.contains("match") || !doc["match"].is_string() ||
            !doc.contains("reply") || !doc["reply"].is_string())
            throw DataError("mock fixture " + file + ": expected {\"match\", \"reply\"} strings");
        fixtures_.push_back({doc["match"].get<std::string>(), doc["reply"].get<std::string>()});
    }
}

int MockProvider::max_observed_parallel() const {
    std::lock_guard<std::mutex> lock(gate_->m);
    return gate_->max_observed;
}

std::string MockProvider::complete(const std::vector<ChatMessage>& messages) {
    {
        std::unique_lock<std::mutex> lock(gate_->m);
        gate_->cv.wait(lock, [&] { return gate_->in_flight < gate_->limit; });
        ++gate_->in_flight;
        gate_->max_observed = std::max(gate_->max_observed, gate_->in_flight);
    }
    if (latency_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_));

    std::string last_user;
    for (const ChatMessage& m : messages)
        if (m.role == "user") last_user = m.content;

    std::string reply;
    bool found = false;
    for (const Fixture& f : fixtures_) {
        if (last_user.find(f.match) != std::string::npos) {
            reply = f.reply;
            found = true;
            break;
        }
    }

    {
        std::lock_guard<std::mutex> lock(gate_->m);
        --gate_->in_flight;
    }
    gate_->cv.notify_one();

    if (!found)
        throw ProviderError("no mock fixture matches request ending with: " +
                            last_user.substr(last_user.size() > 160 ? last_user.size() - 160 : 0));
    return reply;
}

struct HttpProvider::Impl {
    ProviderConfig config;
    std::string api_key;
    SleepFn sleep;
    std::string base;  // scheme://host[:port]
    std::string path;

    std::mutex m;
    std::condition_variable cv;
    int in_flight = 0;
};

HttpProvider::HttpProvider(const ProviderConfig& config, const std::string& api_key, SleepFn sleep)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = config;
    impl_->config.max_parallel_requests = std::max(1, config.max_parallel_requests);
    impl_->api_key = api_key;
    impl_->sleep = sleep ? std::move(sleep) : [](int ms) {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    };
    const std::string& url = config.endpoint_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint_url must be http(s)://... or mock:<dir>, got: " + url);
    if (url.rfind("https://", 0) == 0)
        throw ProviderError("https endpoints need TLS support this build lacks; use http or mock:");
    auto path_start = url.find('/', scheme_end + 3);
    impl_->base = path_start == std::string::npos ? url : url.substr(0, path_start);
    impl_->path = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
}

HttpProvider::~HttpProvider() = default;

namespace {

std::string parse_completion(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed provider response: ") + e.what());
    }
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
        throw ProviderError("provider response has no choices");
    const auto& msg = doc["choices"][0]["message"];
    if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string())
        throw ProviderError("provider response choice carries no message content");
    return msg["content"].get<std::string>();
}

}  // namespace

std::string HttpProvider::complete(const std::vector<ChatMessage>& messages) {
    {
        std::unique_lock<std::mutex> lock(impl_->m);
        impl_->cv.wait(lock, [&] { return impl_->in_flight < impl_->config.max_parallel_requests; });
        ++impl_->in_flight;
    }
    struct Release {
        Impl* impl;
        ~Release() {
            {
                std::lock_guard<std::mutex> lock(impl->m);
                --impl->in_flight;
            }
            impl->cv.notify_one();
        }
    } release{impl_.get()};

    nlohmann::json payload;
    payload["model"] = impl_->config.model_name;
    payload["messages"] = nlohmann::json::array();
    for (const ChatMessage& m : messages)
        payload["messages"].push_back({{"role", m.role}, {"content", m.content}});
    payload["temperature"] = impl_->config.temperature;
    payload["max_tokens"] = impl_->config.max_output_tokens;
    std::string body = payload.dump();

    httplib::Headers headers;
    if (!impl_->api_key.empty()) headers.emplace("Authorization", "Bearer " + impl_->api_key);

    std::string last_error;
    int delay_ms = 1000;
    for (int attempt = 0;; ++attempt) {
        httplib::Client client(impl_->base);
        client.set_read_timeout(120, 0);
        auto res = client.Post(impl_->path, headers, body, "application/json");
        if (res && res->status == 200) return parse_completion(res->body);
        bool retryable;
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            retryable = true;
        } else {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            retryable = res->status == 429 || res->status >= 500;
        }
        if (!retryable || attempt >= impl_->config.retry_limit)
            throw ProviderError("provider request failed after " + std::to_string(attempt + 1) +
                                " attempt(s): " + last_error);
        impl_->sleep(delay_ms);
        delay_ms *= 2;
    }
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    if (config.endpoint_url.rfind("mock:", 0) == 0)
        return std::make_unique<MockProvider>(config.endpoint_url.substr(5),
                                              config.max_parallel_requests);
    const char* key = std::getenv("SCUD_API_KEY");
    return std::make_unique<HttpProvider>(config, key ? key : "");
}

std::string mode_name(DecomposeMode mode) {
    return mode == DecomposeMode::Subsumed ? "subsumed" : "independent";
}

DecomposeMode mode_from_name(const std::string& name) {
    if (name == "subsumed") return DecomposeMode::Subsumed;
    if (name == "independent") return DecomposeMode::Independent;
    throw ConfigError("unknown decomposition mode: " + name);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

}  // namespace

DecompositionTemplates load_decomposition_templates(const std::string& dir) {
    DecompositionTemplates t;
    t.subsumed_instruction = read_file((fs::path(dir) / "subsumed.txt").string());
    t.independent_instruction = read_file((fs::path(dir) / "independent.txt").string());
    return t;
}

namespace {

std::string decomposition_query(const PoolEntry& entry) {
    return "original question: " + entry.utterance + "\n\ncode: " + print_program(entry.program) +
           "\n\ndecomposition:";
}

}  // namespace

std::vector<std::vector<ChatMessage>> build_decomposition_prompts(
    const PoolEntry& entry, DecomposeMode mode, const std::vector<FewShot>& few_shots,
    const DecompositionTemplates& templates) {
    std::vector<std::vector<ChatMessage>> prompts;
    if (mode == DecomposeMode::Subsumed) {
        if (few_shots.empty())
            throw EmptyFewShots("subsumed decomposition needs at least one few-shot example");
        std::vector<ChatMessage> messages;
        messages.push_back({"system", templates.subsumed_instruction});
        for (const FewShot& shot : few_shots) {
            messages.push_back({"user", decomposition_query(shot.entry)});
            messages.push_back({"assistant", serialize_decomposition(shot.tree)});
        }
        messages.push_back({"user", decomposition_query(entry)});
        prompts.push_back(std::move(messages));
        return prompts;
    }
    for (const Subtree& fragment : enumerate_fragments(entry.program)) {
        std::vector<ChatMessage> messages;
        messages.push_back({"system", templates.independent_instruction});
        messages.push_back({"user", "code: " + print_program(fragment.program)});
        prompts.push_back(std::move(messages));
    }
    return prompts;
}

namespace {

double token_overlap(const std::string& sub, const std::string& original) {
    std::vector<std::string> sub_tokens = tokenize(sub);
    if (sub_tokens.empty()) return 0.0;
    std::set<std::string> sub_set(sub_tokens.begin(), sub_tokens.end());
    std::vector<std::string> orig_tokens = tokenize(original);
    std::set<std::string> orig_set(orig_tokens.begin(), orig_tokens.end());
    std::size_t hit = 0;
    for (const std::string& t : sub_set) hit += orig_set.count(t);
    return static_cast<double>(hit) / static_cast<double>(sub_set.size());
}

bool has_reason(const NodeVerdict& v, RejectReason r) {
    return std::find(v.reasons.begin(), v.reasons.end(), r) != v.reasons.end();
}

void emit_fragments(const DecompositionTree& node, NodePath& path, bool ancestors_ok,
                    const PoolEntry& entry, const std::map<std::string, const NodeVerdict*>& byPath,
                    const OperatorVocabulary& vocab, bool keep_invalid, GenerateOutcome& out) {
    const NodeVerdict& verdict = *byPath.at(path_to_string(path));
    bool ok = verdict.accepted ||
              (keep_invalid && !has_reason(verdict, RejectReason::Containment));
    ok = ok && ancestors_ok && contains_fragment(entry.program, node.code, vocab);
    if (ok && !path.empty())
        out.fragments.push_back(make_fragment(entry, path, node.utterance, node.code, vocab));
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        emit_fragments(node.children[i], path, ok, entry, byPath, vocab, keep_invalid, out);
        path.pop_back();
    }
}

}  // namespace

GenerateOutcome generate_fragments(const PoolEntry& entry, DecomposeMode mode, Provider& provider,
                                   const OperatorVocabulary& vocab,
                                   const DecompositionTemplates& templates,
                                   const std::vector<FewShot>& few_shots, bool keep_invalid) {
    GenerateOutcome out;
    auto prompts = build_decomposition_prompts(entry, mode, few_shots, templates);

    if (mode == DecomposeMode::Subsumed) {
        std::string reply = provider.complete(prompts[0]);
        AuditRecord record;
        record.origin_id = entry.id;
        record.mode = mode_name(mode);
        record.request = prompts[0];
        record.reply = reply;

        DecompositionTree tree;
        auto attach = [&](const DataError& e) {
            return std::string(e.what()) + "\nraw reply:\n" + reply;
        };
        try {
            tree = parse_decomposition_json(reply);
        } catch (const MultipleRoots& e) {
            throw MultipleRoots(attach(e));
        } catch (const MissingCodeField& e) {
            throw MissingCodeField(attach(e));
        } catch (const UnparseableCode& e) {
            throw UnparseableCode(attach(e));
        } catch (const MalformedJson& e) {
            throw MalformedJson(attach(e));
        }

        out.validation = validate_decomposition(entry.program, tree, vocab);
        std::map<std::string, const NodeVerdict*> byPath;
        for (const NodeVerdict& v : out.validation.nodes) byPath[path_to_string(v.path)] = &v;
        NodePath path;
        emit_fragments(tree, path, true, entry, byPath, vocab, keep_invalid, out);

        record.fragments = static_cast<int>(out.fragments.size());
        for (const PoolEntry& f : out.fragments)
            record.overlaps.push_back(token_overlap(f.utterance, entry.utterance));
        out.audit.push_back(std::move(record));
    } else {
        std::vector<Subtree> fragments = enumerate_fragments(entry.program);
        std::vector<std::future<std::string>> futures;
        futures.reserve(prompts.size());
        for (const auto& messages : prompts)
            futures.push_back(std::async(std::launch::async, [&provider, messages] {
                return provider.complete(messages);
            }));
        for (std::size_t i = 0; i < futures.size(); ++i) {
            std::string reply = futures[i].get();
            AuditRecord record;
            record.origin_id = entry.id;
            record.mode = mode_name(mode);
            record.request = prompts[i];
            record.reply = reply;
            std::string utterance = strip_code_fences(reply);
            if (!utterance.empty() || keep_invalid) {
                out.fragments.push_back(
                    make_fragment(entry, fragments[i].path, utterance, fragments[i].program, vocab));
                record.fragments = 1;
                record.overlaps.push_back(token_overlap(utterance, entry.utterance));
            }
            out.audit.push_back(std::move(record));
        }
    }

    std::sort(out.fragments.begin(), out.fragments.end(), [](const PoolEntry& a, const PoolEntry& b) {
        if (a.origin_id != b.origin_id) return a.origin_id < b.origin_id;
        return a.path < b.path;
    });
    return out;
}

}  // namespace scud

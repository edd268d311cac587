#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scud/decompose.hpp"
#include "scud/pool.hpp"

namespace scud {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

struct ProviderConfig {
    std::string endpoint_url;  // http(s) chat-completions URL, or "mock:<fixture dir>"
    std::string model_name = "gpt-4";
    double temperature = 0.0;
    int max_output_tokens = 1024;
    int max_parallel_requests = 4;
    int retry_limit = 3;
};

class Provider {
  public:
    virtual ~Provider() = default;
    // Returns the assistant's reply text; throws ProviderError.
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

// Deterministic fixture-backed provider. The fixture directory holds *.json
// files of the shape {"match": "<substring>", "reply": "<assistant text>"};
// files are consulted in sorted filename order and the first whose match
// occurs in the last user message wins. Unmatched requests throw.
class MockProvider : public Provider {
  public:
    MockProvider(const std::string& fixture_dir, int max_parallel_requests,
                 int latency_ms = 0);
    std::string complete(const std::vector<ChatMessage>& messages) override;

    // High-water mark of concurrent complete() calls.
    int max_observed_parallel() const;

  private:
    struct Fixture {
        std::string match;
        std::string reply;
    };
    struct Gate;
    std::vector<Fixture> fixtures_;
    std::shared_ptr<Gate> gate_;
    int latency_ms_;
};

// OpenAI-compatible chat-completions client. POSTs
// {model, messages, temperature, max_tokens} and reads
// choices[0].message.content. Bearer auth from api_key when non-empty.
// Retries connection errors, 429 and 5xx with exponential backoff (1s
// doubling) up to retry_limit extra attempts. In-flight requests are capped
// at max_parallel_requests.
class HttpProvider : public Provider {
  public:
    using SleepFn = std::function<void(int /*ms*/)>;
    HttpProvider(const ProviderConfig& config, const std::string& api_key,
                 SleepFn sleep = nullptr);
    ~HttpProvider() override;
    std::string complete(const std::vector<ChatMessage>& messages) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "mock:<dir>" endpoints get a MockProvider; anything else an HttpProvider
// with the API key from $SCUD_API_KEY.
std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

enum class DecomposeMode { Subsumed, Independent };

std::string mode_name(DecomposeMode mode);
DecomposeMode mode_from_name(const std::string& name);  // throws ConfigError

struct DecompositionTemplates {
    std::string subsumed_instruction;     // system turn for subsumed decomposition
    std::string independent_instruction;  // system turn for per-subtree generation
};

// Reads subsumed.txt and independent.txt from dir.
DecompositionTemplates load_decomposition_templates(const std::string& dir);

struct FewShot {
    PoolEntry entry;
    DecompositionTree tree;
};

// Subsumed: one message list — instruction, few-shot user/assistant pairs,
// then the query turn ("original question: ...", "code: ...",
// "decomposition:"). Independent: one list per enumerated fragment, each the
// instruction plus the fragment's code, with no access to the utterance.
std::vector<std::vector<ChatMessage>> build_decomposition_prompts(
    const PoolEntry& entry, DecomposeMode mode, const std::vector<FewShot>& few_shots,
    const DecompositionTemplates& templates);

// One record per provider call.
struct AuditRecord {
    std::string origin_id;
    std::string mode;
    std::vector<ChatMessage> request;
    std::string reply;
    int fragments = 0;             // fragments this call produced
    std::vector<double> overlaps;  // per fragment: |tokens ∩ origin| / |tokens|
};

struct GenerateOutcome {
    std::vector<PoolEntry> fragments;  // sorted by (origin_id, path)
    ValidationReport validation;       // subsumed mode; empty otherwise
    std::vector<AuditRecord> audit;
};

// Subsumed: one request, reply parsed as a nested decomposition, validated
// against the entry, accepted non-root nodes (whose ancestors were accepted)
// emitted with their decomposition-tree position as path. keep_invalid retains
// empty-utterance/duplicate-template nodes; containment failures always prune.
// Independent: one request per enumerated fragment; the reply text is the
// fragment's utterance. Parse errors carry the raw reply in their message.
GenerateOutcome generate_fragments(const PoolEntry& entry, DecomposeMode mode, Provider& provider,
                                   const OperatorVocabulary& vocab,
                                   const DecompositionTemplates& templates,
                                   const std::vector<FewShot>& few_shots,
                                   bool keep_invalid = false);

}  // namespace scud

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"
#include "rbeval/outcome_model.hpp"

namespace rbeval {

struct RetryPolicy {
    int max_attempts = 3;
    double base_backoff_seconds = 0.5;
    double multiplier = 2.0;
};

struct TargetConfig {
    std::string endpoint_url;  // chat-completions style endpoint
    std::string model_id;
    std::string api_key_env = "RBEVAL_API_KEY";
    double timeout_seconds = 60.0;
    int max_in_flight = 4;
    RetryPolicy retry;
    double requests_per_minute = 0.0;  // 0 = unlimited
    // Decoding settings are pass-through only; unset fields are omitted from requests.
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::optional<int> max_tokens;

    static TargetConfig from_json(const nlohmann::json& j);
    static TargetConfig load(const std::string& path);
    void validate() const;
};

// Deterministic offline stand-in for a live target: every (artifact, family)
// cell carries an outcome triple, and each run's category is a pure function
// of (seed, prompt identity).
struct MockProfile {
    std::string model_id = "mock-target";
    std::uint64_t seed = 0;
    OutcomeCellTable cells;
    CannedResponses responses = CannedResponses::defaults();

    static MockProfile from_json(const nlohmann::json& j);
    static MockProfile load(const std::string& path);
};

struct QueryResult {
    std::string response_text;
    bool valid = false;
};

// Issues one live request with exponential-backoff retries on transient
// failures. Auth failures abort the campaign (ConfigError); exhausted retries
// and blank bodies come back as valid=false so the campaign loop can continue.
QueryResult query_target(const PerturbedPrompt& prompt, const TargetConfig& config);

std::string mock_response(const PerturbedPrompt& prompt, const MockProfile& profile);

// Strict-spacing token bucket; acquire() blocks until a slot is available.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_minute);
    void acquire();

private:
    std::mutex mutex_;
    std::chrono::steady_clock::duration interval_{};
    std::chrono::steady_clock::time_point next_allowed_;
};

using QueryFn = std::function<QueryResult(const PerturbedPrompt&)>;

struct CampaignOptions {
    std::string model_id;
    int max_in_flight = 1;
    double requests_per_minute = 0.0;
    std::string checkpoint_path;  // empty disables checkpointing
};

// Runs every prompt not already present in the checkpoint, with at most
// max_in_flight requests outstanding. Completed records are appended to the
// checkpoint as they arrive; on success the checkpoint is rewritten in
// canonical order. Returns checkpointed + new records, canonically sorted,
// outcomes unset.
std::vector<RunRecord> run_campaign(const std::vector<PerturbedPrompt>& prompts, QueryFn query,
                                    const CampaignOptions& options);

std::vector<RunRecord> run_campaign(const std::vector<PerturbedPrompt>& prompts,
                                    const TargetConfig& config,
                                    const std::string& checkpoint_path);

std::vector<RunRecord> run_campaign(const std::vector<PerturbedPrompt>& prompts,
                                    const MockProfile& profile,
                                    const std::string& checkpoint_path, int max_in_flight = 4);

std::string iso8601_utc_now();

}  // namespace rbeval

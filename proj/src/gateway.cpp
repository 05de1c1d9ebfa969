#include "rbeval/gateway.hpp"

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>

#include "rbeval/errors.hpp"
#include "rbeval/hashing.hpp"
#include "rbeval/records_io.hpp"

namespace rbeval {

namespace {

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "https://api.example.com"
    std::string path;              // e.g. "/v1/chat/completions"
};

ParsedUrl parse_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint_url must include a scheme: " + url);
    }
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("endpoint_url scheme must be http or https: " + url);
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

TargetConfig TargetConfig::from_json(const nlohmann::json& j) {
    TargetConfig c;
    c.endpoint_url = j.value("endpoint_url", std::string{});
    c.model_id = j.value("model_id", std::string{});
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    if (j.contains("retry")) {
        const auto& r = j["retry"];
        c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
        c.retry.base_backoff_seconds = r.value("base_backoff_seconds", c.retry.base_backoff_seconds);
        c.retry.multiplier = r.value("multiplier", c.retry.multiplier);
    }
    c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
    if (j.contains("temperature")) c.temperature = j["temperature"].get<double>();
    if (j.contains("top_p")) c.top_p = j["top_p"].get<double>();
    if (j.contains("max_tokens")) c.max_tokens = j["max_tokens"].get<int>();
    c.validate();
    return c;
}

TargetConfig TargetConfig::load(const std::string& path) {
    return from_json(read_json_file(path));
}

void TargetConfig::validate() const {
    if (endpoint_url.empty()) throw ConfigError("target config: endpoint_url is required");
    if (model_id.empty()) throw ConfigError("target config: model_id is required");
    if (timeout_seconds <= 0) throw ConfigError("target config: timeout_seconds must be > 0");
    if (max_in_flight < 1) throw ConfigError("target config: max_in_flight must be >= 1");
    if (retry.max_attempts < 1) throw ConfigError("target config: retry.max_attempts must be >= 1");
    if (retry.base_backoff_seconds < 0 || retry.multiplier < 1) {
        throw ConfigError("target config: invalid retry backoff settings");
    }
    parse_url(endpoint_url);
}

MockProfile MockProfile::from_json(const nlohmann::json& j) {
    MockProfile p;
    p.model_id = j.value("model_id", p.model_id);
    p.seed = j.value("seed", std::uint64_t{0});
    if (!j.contains("cells")) throw ConfigError("mock profile: 'cells' array is required");
    p.cells = OutcomeCellTable::from_json(j["cells"]);
    if (j.contains("responses")) p.responses = CannedResponses::from_json(j["responses"]);
    return p;
}

MockProfile MockProfile::load(const std::string& path) {
    return from_json(read_json_file(path));
}

std::string mock_response(const PerturbedPrompt& prompt, const MockProfile& profile) {
    const OutcomeTriple& cell = profile.cells.lookup(prompt.artifact_type, prompt.family);
    StreamKey key(profile.seed);
    key.mix("mock-response").mix(prompt.id);
    const Outcome category = cell.draw(key.uniform01());
    return profile.responses.for_outcome(category);
}

QueryResult query_target(const PerturbedPrompt& prompt, const TargetConfig& config) {
    const ParsedUrl url = parse_url(config.endpoint_url);
    const char* api_key = config.api_key_env.empty() ? nullptr
                                                     : std::getenv(config.api_key_env.c_str());

    nlohmann::json body;
    body["model"] = config.model_id;
    body["messages"] = nlohmann::json::array({
        nlohmann::json{{"role", "user"}, {"content", prompt.text}},
    });
    if (config.temperature) body["temperature"] = *config.temperature;
    if (config.top_p) body["top_p"] = *config.top_p;
    if (config.max_tokens) body["max_tokens"] = *config.max_tokens;
    const std::string payload = body.dump();

    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(std::chrono::duration<double>(config.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config.timeout_seconds));
    if (api_key != nullptr) {
        client.set_default_headers({{"Authorization", std::string("Bearer ") + api_key}});
    }

    double backoff = config.retry.base_backoff_seconds;
    for (int attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
        httplib::Result res = client.Post(url.path, payload, "application/json");
        if (res) {
            if (res->status == 401 || res->status == 403) {
                throw ConfigError("authentication failed (HTTP " + std::to_string(res->status) +
                                  ") for " + config.endpoint_url);
            }
            if (res->status >= 200 && res->status < 300) {
                if (is_blank(res->body)) return {"", false};
                std::string content;
                try {
                    const auto parsed = nlohmann::json::parse(res->body);
                    content = parsed.at("choices").at(0).at("message").at("content")
                                  .get<std::string>();
                } catch (const nlohmann::json::exception&) {
                    // Non-conforming body counts as a blank response.
                    return {"", false};
                }
                if (is_blank(content)) return {"", false};
                return {content, true};
            }
            if (res->status < 500 && res->status != 429) {
                // Client errors other than throttling will not improve on retry.
                return {"", false};
            }
        }
        if (attempt < config.retry.max_attempts && backoff > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= config.retry.multiplier;
        }
    }
    return {"", false};
}

RateLimiter::RateLimiter(double requests_per_minute) {
    if (requests_per_minute > 0) {
        interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(60.0 / requests_per_minute));
    }
    next_allowed_ = std::chrono::steady_clock::now();
}

void RateLimiter::acquire() {
    if (interval_.count() == 0) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_allowed_);
        next_allowed_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

std::string iso8601_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::vector<RunRecord> run_campaign(const std::vector<PerturbedPrompt>& prompts, QueryFn query,
                                    const CampaignOptions& options) {
    if (prompts.empty()) throw ValidationError("campaign has no prompts");
    if (options.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");

    std::vector<RunRecord> done;
    std::set<std::string> completed_ids;
    if (!options.checkpoint_path.empty() &&
        std::filesystem::exists(options.checkpoint_path)) {
        done = read_records(options.checkpoint_path);
        for (const RunRecord& r : done) completed_ids.insert(r.run_id);
    }

    std::vector<const PerturbedPrompt*> pending;
    for (const PerturbedPrompt& p : prompts) {
        if (!completed_ids.count(make_run_id(options.model_id, p.id))) pending.push_back(&p);
    }

    std::ofstream checkpoint;
    if (!options.checkpoint_path.empty()) {
        checkpoint.open(options.checkpoint_path, std::ios::app);
        if (!checkpoint) {
            throw TransportError("cannot open checkpoint for append: " + options.checkpoint_path);
        }
    }

    RateLimiter limiter(options.requests_per_minute);
    std::mutex writer_mutex;  // serializes record emission
    std::atomic<std::size_t> next_index{0};
    std::exception_ptr first_error;
    std::atomic<bool> abort{false};

    auto worker = [&]() {
        while (!abort.load()) {
            const std::size_t i = next_index.fetch_add(1);
            if (i >= pending.size()) return;
            const PerturbedPrompt& prompt = *pending[i];
            RunRecord record;
            record.run_id = make_run_id(options.model_id, prompt.id);
            record.model_id = options.model_id;
            record.base_id = prompt.base_id;
            record.family = prompt.family;
            record.variant_index = prompt.variant_index;
            record.artifact_type = prompt.artifact_type;
            record.prompt_text = prompt.text;
            try {
                limiter.acquire();
                QueryResult result = query(prompt);
                record.response_text = std::move(result.response_text);
                record.valid = result.valid && !is_blank(record.response_text);
            } catch (...) {
                std::lock_guard lock(writer_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true);
                return;
            }
            record.timestamp = iso8601_utc_now();
            std::lock_guard lock(writer_mutex);
            if (checkpoint.is_open()) {
                append_record(checkpoint, record);
                checkpoint.flush();
            }
            done.push_back(std::move(record));
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(options.max_in_flight), pending.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Completed work is already persisted; surface the failure afterwards.
    if (first_error) std::rethrow_exception(first_error);

    sort_canonical(done);
    if (!options.checkpoint_path.empty()) {
        checkpoint.close();
        write_records(options.checkpoint_path, done);
    }
    return done;
}

std::vector<RunRecord> run_campaign(const std::vector<PerturbedPrompt>& prompts,
                                    const TargetConfig& config,
                                    const std::string& checkpoint_path) {
    config.validate();
    if (!config.api_key_env.empty() && std::getenv(config.api_key_env.c_str()) == nullptr) {
        throw ConfigError("environment variable '" + config.api_key_env +
                          "' is not set; refusing to start a live campaign");
    }
    CampaignOptions options;
    options.model_id = config.model_id;
    options.max_in_flight = config.max_in_flight;
    options.requests_per_minute = config.requests_per_minute;
    options.checkpoint_path = checkpoint_path;
    return run_campaign(
        prompts, [&config](const PerturbedPrompt& p) { return query_target(p, config); }, options);
}

std::vector<RunRecord> run_campaign(const std::vector<PerturbedPrompt>& prompts,
                                    const MockProfile& profile,
                                    const std::string& checkpoint_path, int max_in_flight) {
    CampaignOptions options;
    options.model_id = profile.model_id;
    options.max_in_flight = max_in_flight;
    options.checkpoint_path = checkpoint_path;
    return run_campaign(
        prompts,
        [&profile](const PerturbedPrompt& p) {
            return QueryResult{mock_response(p, profile), true};
        },
        options);
}

}  // namespace rbeval

#pragma once

// Text-generation provider: a chat-completion HTTP endpoint (live) or a
// directory of recorded responses keyed by request hash (fixture).

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace explorable {

struct ChatMessage {
    std::string role; // system | user | assistant
    std::string content;
};

struct CompletionRequest {
    std::string purpose;                         // formalize | link | template
    std::map<std::string, std::string> metadata; // doc, step, attempt, ...
    std::vector<ChatMessage> messages;

    // Sorted-key JSON; the fixture key hashes exactly this.
    nlohmann::json canonical() const;
    std::string hash() const; // SHA-256, lowercase hex
};

enum class ProviderMode { live, fixture };

ProviderMode parse_provider_mode(const std::string &s);

struct ProviderConfig {
    ProviderMode mode = ProviderMode::fixture;
    std::filesystem::path fixture_dir;
    std::string base_url; // e.g. http://127.0.0.1:8089/v1
    std::string model = "default";
    std::string api_key_env = "EXPLORABLE_PROVIDER_KEY";
    bool record = true; // live responses are written to fixture_dir
    double timeout_seconds = 120.0;

    // Fills base_url/model from EXPLORABLE_PROVIDER_URL / EXPLORABLE_PROVIDER_MODEL.
    static ProviderConfig from_env(ProviderMode mode, std::filesystem::path fixture_dir);
};

class GenerationProvider {
public:
    explicit GenerationProvider(ProviderConfig config);

    // Fixture mode: stored bytes or FixtureMiss. Live mode: endpoint output
    // verbatim, recorded when configured. Errors: ProviderHTTPError.
    std::string complete(const CompletionRequest &request);

    const ProviderConfig &config() const { return config_; }
    std::uint64_t live_calls() const { return live_calls_.load(); }

private:
    std::string call_endpoint(const CompletionRequest &request);
    void record(const CompletionRequest &request, const std::string &hash, const std::string &response);

    ProviderConfig config_;
    std::mutex record_mutex_;
    std::atomic<std::uint64_t> live_calls_{0};
};

std::string sha256_hex(const std::string &data);

// Versioned prompt file `<name>.v<version>.txt` from the prompts directory
// (EXPLORABLE_PROMPTS, else the source tree's prompts/).
std::string load_prompt(const std::string &name, int version = 1);

// Replaces ${key} occurrences.
std::string fill_prompt(std::string prompt, const std::map<std::string, std::string> &vars);

} // namespace explorable

#include "explorable/formalizer/provider.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <iomanip>
#include <sstream>

#ifndef EXPLORABLE_SOURCE_DIR
#define EXPLORABLE_SOURCE_DIR "."
#endif

namespace explorable {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string &data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

nlohmann::json CompletionRequest::canonical() const
{
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto &m : messages)
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"purpose", purpose}, {"metadata", metadata}, {"messages", msgs}};
}

std::string CompletionRequest::hash() const { return sha256_hex(canonical().dump()); }

ProviderMode parse_provider_mode(const std::string &s)
{
    if (s == "live")
        return ProviderMode::live;
    if (s == "fixture")
        return ProviderMode::fixture;
    throw ConfigError("provider mode must be live or fixture, got '" + s + "'");
}

ProviderConfig ProviderConfig::from_env(ProviderMode mode, fs::path fixture_dir)
{
    ProviderConfig c;
    c.mode = mode;
    c.fixture_dir = std::move(fixture_dir);
    if (const char *url = std::getenv("EXPLORABLE_PROVIDER_URL"))
        c.base_url = url;
    if (const char *model = std::getenv("EXPLORABLE_PROVIDER_MODEL"))
        c.model = model;
    return c;
}

GenerationProvider::GenerationProvider(ProviderConfig config) : config_(std::move(config)) {}

std::string GenerationProvider::complete(const CompletionRequest &request)
{
    auto hash = request.hash();
    if (config_.mode == ProviderMode::fixture) {
        auto path = config_.fixture_dir / (hash + ".txt");
        std::error_code ec;
        if (!fs::exists(path, ec))
            throw FixtureMiss("no stored response " + hash + " (" + request.purpose + ") in " +
                              config_.fixture_dir.string());
        return read_file(path);
    }
    auto response = call_endpoint(request);
    if (config_.record && !config_.fixture_dir.empty())
        record(request, hash, response);
    return response;
}

std::string GenerationProvider::call_endpoint(const CompletionRequest &request)
{
    if (config_.base_url.empty())
        throw ProviderHTTPError("no endpoint configured (set EXPLORABLE_PROVIDER_URL)");
    // Split "scheme://host:port/prefix" into the client origin and a path prefix.
    std::string url = config_.base_url;
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/')
        prefix.pop_back();

    httplib::Client client(origin);
    client.set_connection_timeout(static_cast<time_t>(config_.timeout_seconds));
    client.set_read_timeout(static_cast<time_t>(config_.timeout_seconds));
    httplib::Headers headers;
    if (const char *key = std::getenv(config_.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body = request.canonical();
    body["model"] = config_.model;
    body["temperature"] = 0;
    live_calls_.fetch_add(1);
    auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res)
        throw ProviderHTTPError(config_.base_url + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw ProviderHTTPError(config_.base_url + " answered HTTP " + std::to_string(res->status) + ": " +
                                res->body.substr(0, 500));
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw ProviderHTTPError("response has no choices");
    const auto &msg = j["choices"][0]["message"];
    if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string())
        throw ProviderHTTPError("response choice has no text content");
    return msg["content"].get<std::string>();
}

void GenerationProvider::record(const CompletionRequest &request, const std::string &hash, const std::string &response)
{
    std::lock_guard lock(record_mutex_);
    fs::create_directories(config_.fixture_dir);
    write_file_atomic(config_.fixture_dir / (hash + ".txt"), response);
    write_file_atomic(config_.fixture_dir / (hash + ".request.json"), request.canonical().dump(2) + "\n");
}

std::string load_prompt(const std::string &name, int version)
{
    fs::path dir = EXPLORABLE_SOURCE_DIR "/prompts";
    if (const char *env = std::getenv("EXPLORABLE_PROMPTS"))
        dir = env;
    auto path = dir / (name + ".v" + std::to_string(version) + ".txt");
    std::error_code ec;
    if (!fs::exists(path, ec))
        throw ConfigError("prompt file not found: " + path.string());
    return read_file(path);
}

std::string fill_prompt(std::string prompt, const std::map<std::string, std::string> &vars)
{
    for (const auto &[k, v] : vars) {
        std::string needle = "${" + k + "}";
        for (std::size_t p = 0; (p = prompt.find(needle, p)) != std::string::npos; p += v.size())
            prompt.replace(p, needle.size(), v);
    }
    return prompt;
}

} // namespace explorable

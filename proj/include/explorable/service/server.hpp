#pragma once

#include "explorable/core/types.hpp"
#include "explorable/runner/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace explorable {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::chrono::milliseconds eval_deadline{30000};
    std::size_t max_uncached_evals = 5;
    std::size_t sweep_cap = 201;
    std::string cors_origin = "*";
};

struct HttpReply {
    int status = 200;
    nlohmann::json body;
};

class Service {
public:
    Service(std::map<std::string, ProofDocument> docs, LeanRunner &runner, std::filesystem::path workdir,
            ServerConfig config = {});
    ~Service();

    // Routes GET requests; usable without a socket.
    HttpReply handle(const std::string &path, const std::multimap<std::string, std::string> &query);

    // Blocks until stop().
    bool listen();
    void stop();
    int bound_port() const { return bound_port_.load(); }

    // Evals currently computed (not served from cache).
    std::size_t uncached_in_flight() const { return in_flight_.load(); }

private:
    HttpReply documents() const;
    HttpReply document(const ProofDocument &doc) const;
    HttpReply sweep(const ProofDocument &doc, const std::multimap<std::string, std::string> &query);
    HttpReply eval(const ProofDocument &doc, const std::multimap<std::string, std::string> &query);
    HttpReply deps(const ProofDocument &doc, const std::multimap<std::string, std::string> &query) const;

    std::map<std::string, ProofDocument> docs_;
    LeanRunner &runner_;
    std::filesystem::path workdir_;
    ServerConfig config_;

    std::mutex mu_;
    std::map<std::string, SweepCache> caches_;                                // doc -> cache
    std::map<std::string, std::shared_future<EvalResult>> pending_;         // doc/binding -> job
    std::atomic<std::size_t> in_flight_{0};

    std::unique_ptr<httplib::Server> http_;
    std::atomic<int> bound_port_{0};
};

// Bundles in `dir`, keyed by document id.
std::map<std::string, ProofDocument> load_bundles(const std::filesystem::path &dir);

} // namespace explorable

// Regenerates <corpus>/fixtures from the hand-written responses in
// <corpus>/<doc>/authored/. A local chat-completions endpoint answers each
// request from the most specific authored file for its purpose, document,
// step and attempt; the pipeline runs in live mode and records every exchange.

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/service/pipeline.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace explorable;
using nlohmann::json;

namespace {

std::string meta(const json &m, const char *key)
{
    if (!m.contains(key))
        return "";
    return m[key].is_string() ? m[key].get<std::string>() : m[key].dump();
}

std::optional<std::string> authored_reply(const fs::path &corpus, const json &body)
{
    auto purpose = body.value("purpose", "");
    const auto &m = body.contains("metadata") ? body["metadata"] : json::object();
    auto doc = meta(m, "doc");
    auto step = meta(m, "step");
    auto attempt = meta(m, "attempt");
    if (doc.empty() || doc.find('/') != std::string::npos)
        return std::nullopt;

    std::vector<std::string> names;
    std::string base = purpose + (step.empty() ? "" : "-step" + step);
    if (!attempt.empty())
        names.push_back(base + "-attempt" + attempt);
    names.push_back(base);
    for (const auto &n : names) {
        auto p = corpus / doc / "authored" / (n + ".txt");
        if (fs::exists(p))
            return read_file(p);
    }
    return std::nullopt;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Record provider fixtures from authored responses"};
    fs::path corpus;
    fs::path out;
    fs::path workdir = fs::temp_directory_path() / "explorable-author";
    bool clean = false;
    app.add_option("--corpus", corpus, "corpus directory")->required();
    app.add_option("--out", out, "fixture directory (default: <corpus>/fixtures)");
    app.add_option("--workdir", workdir, "scratch directory");
    app.add_flag("--clean", clean, "remove existing fixtures first");
    CLI11_PARSE(app, argc, argv);
    if (out.empty())
        out = corpus / "fixtures";

    httplib::Server server;
    std::atomic<int> misses{0};
    server.Post(R"(/v1/chat/completions)", [&](const httplib::Request &req, httplib::Response &res) {
        auto body = json::parse(req.body, nullptr, false);
        auto reply = body.is_discarded() ? std::nullopt : authored_reply(corpus, body);
        if (!reply) {
            ++misses;
            std::cerr << "no authored response for " << (body.is_discarded() ? req.body : body["metadata"].dump())
                      << " (" << body.value("purpose", "?") << ")\n";
            res.status = 500;
            res.set_content("no authored response", "text/plain");
            return;
        }
        json r = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", *reply}}}}})}};
        res.set_content(r.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });

    int status = 0;
    try {
        if (clean)
            fs::remove_all(out);
        fs::remove_all(workdir);
        ProviderConfig pc;
        pc.mode = ProviderMode::live;
        pc.fixture_dir = out;
        pc.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
        GenerationProvider provider(pc);
        LeanRunner runner(ToolchainConfig::from_env());
        PipelineConfig config;
        config.corpus = corpus;
        config.workdir = workdir;
        config.fixtures = out;
        config.provider = ProviderMode::live;
        for (const auto &id : list_corpus(corpus)) {
            StageLog log;
            auto entry = load_corpus_entry(corpus, id);
            auto doc = formalize_document(entry, provider, runner, config, log);
            analyze_document(doc, provider, runner, config, log);
            for (const auto &w : log.warnings)
                std::cerr << id << ": warning: " << w << "\n";
            std::cout << id << ": recorded\n";
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 1;
    }
    server.stop();
    listener.join();
    if (misses > 0)
        status = 1;
    std::size_t recorded = 0;
    if (fs::is_directory(out))
        for (const auto &e : fs::directory_iterator(out))
            recorded += e.path().extension() == ".txt";
    std::cout << recorded << " fixtures in " << out.string() << "\n";
    return status;
}

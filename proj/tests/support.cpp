#include "support.hpp"

#include "explorable/formalizer/provider.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace explorable::testing {

fs::path source_dir() { return EXPLORABLE_TEST_SOURCE_DIR; }
fs::path corpus_dir() { return source_dir() / "corpus"; }

ScratchDir::ScratchDir(const std::string &tag)
{
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("explorable-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

ScratchDir::~ScratchDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

PipelineConfig fixture_config(const fs::path &workdir)
{
    PipelineConfig c;
    c.corpus = corpus_dir();
    c.workdir = workdir;
    c.provider = ProviderMode::fixture;
    return c;
}

ProofDocument build_document(const std::string &id, LeanRunner &runner, const PipelineConfig &config,
                             bool with_sweeps, StageLog *log)
{
    StageLog local;
    StageLog &l = log ? *log : local;
    GenerationProvider provider(ProviderConfig::from_env(ProviderMode::fixture, config.fixture_dir()));
    auto entry = load_corpus_entry(config.corpus, id);
    auto doc = formalize_document(entry, provider, runner, config, l);
    analyze_document(doc, provider, runner, config, l);
    if (with_sweeps)
        precompute_document(doc, runner, config, {}, l);
    return doc;
}

Binding bind(std::initializer_list<std::pair<const std::string, std::int64_t>> values)
{
    Binding b;
    b.assignments = values;
    return b;
}

std::optional<std::int64_t> int_value(const ProbeResult &probe, const std::string &key)
{
    auto it = probe.values.find(key);
    if (it == probe.values.end())
        return std::nullopt;
    if (const auto *v = std::get_if<std::int64_t>(&it->second))
        return *v;
    return std::nullopt;
}

int run_cli(const std::string &args, std::string *out)
{
    std::string cmd = std::string("\"") + EXPLORABLE_TEST_CLI + "\" " + args + " 2>&1";
    FILE *pipe = ::popen(cmd.c_str(), "r");
    if (!pipe)
        return -1;
    std::array<char, 4096> buf{};
    std::string text;
    while (auto n = std::fread(buf.data(), 1, buf.size(), pipe))
        text.append(buf.data(), n);
    int status = ::pclose(pipe);
    if (out)
        *out = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace explorable::testing

#pragma once

// Shared helpers: corpus paths, scratch directories and in-process pipeline runs.

#include "explorable/core/types.hpp"
#include "explorable/runner/runner.hpp"
#include "explorable/service/pipeline.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace explorable::testing {

std::filesystem::path source_dir();
std::filesystem::path corpus_dir();

// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string &tag);
    ~ScratchDir();
    ScratchDir(const ScratchDir &) = delete;
    ScratchDir &operator=(const ScratchDir &) = delete;
    const std::filesystem::path &path() const { return path_; }

private:
    std::filesystem::path path_;
};

PipelineConfig fixture_config(const std::filesystem::path &workdir);

// formalize + analyze in fixture mode; precompute too when `with_sweeps`.
ProofDocument build_document(const std::string &id, LeanRunner &runner, const PipelineConfig &config,
                             bool with_sweeps = false, StageLog *log = nullptr);

Binding bind(std::initializer_list<std::pair<const std::string, std::int64_t>> values);

std::optional<std::int64_t> int_value(const ProbeResult &probe, const std::string &key);

// Runs the CLI; returns its exit status, output captured into `out`.
int run_cli(const std::string &args, std::string *out = nullptr);

} // namespace explorable::testing

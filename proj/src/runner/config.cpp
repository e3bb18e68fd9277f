#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/core/text.hpp"
#include "explorable/runner/runner.hpp"

#include <cstdlib>
#include <sstream>
#include <thread>

#ifndef EXPLORABLE_DEFAULT_LEAN
#define EXPLORABLE_DEFAULT_LEAN "lean"
#endif

namespace explorable {

namespace {

std::optional<std::string> env(const char *name)
{
    const char *v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    return std::string(v);
}

} // namespace

ToolchainConfig ToolchainConfig::defaults()
{
    ToolchainConfig c;
    c.command = {EXPLORABLE_DEFAULT_LEAN};
    return c;
}

ToolchainConfig ToolchainConfig::from_env()
{
    auto c = defaults();
    if (auto v = env("EXPLORABLE_LEAN")) {
        std::istringstream in(*v);
        c.command.clear();
        for (std::string part; in >> part;)
            c.command.push_back(part);
    }
    if (auto v = env("EXPLORABLE_LEAN_PROJECT"))
        c.project_dir = *v;
    if (auto v = env("EXPLORABLE_LEAN_TIMEOUT")) {
        char *end = nullptr;
        double t = std::strtod(v->c_str(), &end);
        if (!end || *end || !(t > 0))
            throw ConfigError("EXPLORABLE_LEAN_TIMEOUT must be a positive number of seconds, got '" + *v + "'");
        c.timeout_seconds = t;
    }
    if (auto v = env("EXPLORABLE_WORKERS")) {
        char *end = nullptr;
        long n = std::strtol(v->c_str(), &end, 10);
        if (!end || *end || n < 1)
            throw ConfigError("EXPLORABLE_WORKERS must be a positive integer, got '" + *v + "'");
        c.workers = static_cast<unsigned>(n);
    }
    return c;
}

unsigned ToolchainConfig::effective_workers() const
{
    if (workers > 0)
        return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string ToolchainConfig::toolchain_id() const
{
    std::string id = command.empty() ? std::string("lean") : std::filesystem::path(command.front()).filename().string();
    auto pin = project_dir / "lean-toolchain";
    std::error_code ec;
    if (!project_dir.empty() && std::filesystem::exists(pin, ec))
        id += " " + text::trim_copy(read_file(pin));
    return id;
}

} // namespace explorable

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/depgraph/depgraph.hpp"
#include "explorable/service/pipeline.hpp"
#include "explorable/service/server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

namespace fs = std::filesystem;
using namespace explorable;

namespace {

int exit_code(ErrorClass c)
{
    switch (c) {
    case ErrorClass::finding:
        return 1;
    case ErrorClass::not_found:
        return 2;
    case ErrorClass::toolchain:
        return 3;
    case ErrorClass::config:
    case ErrorClass::input:
        return 4;
    }
    return 4;
}

void print(const StageLog &log)
{
    for (const auto &w : log.warnings)
        std::cerr << "warning: " << w << "\n";
    for (const auto &f : log.findings)
        std::cerr << "finding: " << f << "\n";
}

std::vector<std::string> selected(const PipelineConfig &config, const std::string &doc)
{
    if (!doc.empty()) {
        load_corpus_entry(config.corpus, doc); // NotFound for unknown ids
        return {doc};
    }
    return list_corpus(config.corpus);
}

ProofDocument load_doc(const PipelineConfig &config, const std::string &id)
{
    auto path = config.bundle_path(id);
    if (!fs::exists(path))
        throw NotFound("no bundle for " + id + " at " + path.string() + "; run formalize first");
    return load_bundle(path).doc;
}

std::map<std::string, IntRange> ranges_for(const ProofDocument &doc, const std::vector<std::string> &args)
{
    std::map<std::string, IntRange> out;
    for (const auto &a : args) {
        auto [var, range] = parse_range_arg(a);
        if (var.empty()) {
            if (doc.written.inputs.size() != 1)
                throw ConfigError("document " + doc.id + " has several inputs; use --range VAR=LO..HI");
            var = doc.written.inputs.front().name;
        }
        out[var] = range;
    }
    return out;
}

Service *g_service = nullptr;

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Explorable proofs: formalize, analyze and serve interactive proof documents"};
    app.require_subcommand(1);

    PipelineConfig config;
    std::string doc;
    std::string provider = "fixture";
    std::vector<std::string> range_args;
    int port = 8080;
    std::string host = "127.0.0.1";

    auto common = [&](CLI::App *sub) {
        sub->add_option("--corpus", config.corpus, "corpus directory")->required();
        sub->add_option("--workdir", config.workdir, "bundles, probes and scratch files");
        sub->add_option("--doc", doc, "document id (default: every document)");
    };
    auto with_provider = [&](CLI::App *sub) {
        sub->add_option("--provider", provider, "live | fixture")->check(CLI::IsMember({"live", "fixture"}));
        sub->add_option("--fixtures", config.fixtures, "fixture directory (default: <corpus>/fixtures)");
    };
    auto *formalize = app.add_subcommand("formalize", "generate aligned Lean proofs and links");
    common(formalize);
    with_provider(formalize);
    auto *analyze = app.add_subcommand("analyze", "recover the dependency graph and worked-example templates");
    common(analyze);
    with_provider(analyze);
    auto *precompute = app.add_subcommand("precompute", "fill the sweep cache");
    common(precompute);
    precompute->add_option("--range", range_args, "LO..HI or VAR=LO..HI (repeatable)");
    auto *check = app.add_subcommand("oracle-check", "compare probes with the oracle over a range");
    common(check);
    check->add_option("--range", range_args, "LO..HI or VAR=LO..HI (repeatable; default: every input's range)");
    auto *serve = app.add_subcommand("serve", "serve bundles over HTTP");
    serve->add_option("--corpus", config.corpus, "corpus directory");
    serve->add_option("--workdir", config.workdir, "bundles, probes and scratch files");
    serve->add_option("--port", port, "listening port");
    serve->add_option("--host", host, "listening address");

    CLI11_PARSE(app, argc, argv);

    try {
        config.provider = parse_provider_mode(provider);
        LeanRunner runner(ToolchainConfig::from_env());
        auto provider_for = [&] {
            return GenerationProvider(ProviderConfig::from_env(config.provider, config.fixture_dir()));
        };
        int status = 0;

        if (formalize->parsed()) {
            auto gen = provider_for();
            for (const auto &id : selected(config, doc)) {
                StageLog log;
                auto entry = load_corpus_entry(config.corpus, id);
                auto d = formalize_document(entry, gen, runner, config, log);
                save_bundle(d, config.bundle_path(id));
                print(log);
                std::cout << id << ": " << d.lean.step_blocks.size() << " step blocks, "
                          << d.links.var_links.size() << " variable links -> " << config.bundle_path(id).string() << "\n";
            }
        } else if (analyze->parsed()) {
            auto gen = provider_for();
            for (const auto &id : selected(config, doc)) {
                StageLog log;
                auto d = load_doc(config, id);
                analyze_document(d, gen, runner, config, log);
                save_bundle(d, config.bundle_path(id));
                print(log);
                if (!log.findings.empty())
                    status = 1;
                std::cout << id << ": " << d.graph->nodes.size() << " facts, " << d.graph->edges.size() << " edges, "
                          << d.graph->warnings.size() << " warnings, " << d.templates.size() << " templates\n";
                auto corpus_entry = load_corpus_entry(config.corpus, id);
                if (corpus_entry.gold) {
                    auto score = score_against_gold(d.graph->step_maps, *corpus_entry.gold);
                    std::cout << "  gold: " << score.correct << "/" << score.steps << " steps recovered ("
                              << score.exact << " exact)\n";
                }
            }
        } else if (precompute->parsed()) {
            for (const auto &id : selected(config, doc)) {
                StageLog log;
                auto d = load_doc(config, id);
                if (!d.written.oracle && doc.empty())
                    continue;
                auto before = runner.invocations();
                precompute_document(d, runner, config, ranges_for(d, range_args), log);
                save_bundle(d, config.bundle_path(id));
                print(log);
                std::cout << id << ": " << d.sweep_cache->evals.size() << " cached evaluations, "
                          << (runner.invocations() - before) << " toolchain runs\n";
            }
        } else if (check->parsed()) {
            for (const auto &id : selected(config, doc)) {
                auto d = load_doc(config, id);
                if (!d.written.oracle && doc.empty())
                    continue;
                auto ranges = ranges_for(d, range_args);
                if (range_args.empty())
                    for (const auto &in : d.written.inputs)
                        ranges[in.name] = in.default_range;
                auto report = oracle_check(d, ranges, runner, config.workdir);
                std::cout << id << ": " << report.bindings << " bindings, " << report.accepted
                          << " satisfy the hypotheses, " << report.disagreements.size() << " disagreements\n";
                for (const auto &dis : report.disagreements)
                    std::cout << "  " << dis.binding.key() << ": " << dis.reason << "\n";
                if (!report.disagreements.empty())
                    status = 1;
            }
        } else if (serve->parsed()) {
            auto docs = load_bundles(config.bundle_dir());
            if (docs.empty())
                throw NotFound("no bundles in " + config.bundle_dir().string());
            ServerConfig sc;
            sc.host = host;
            sc.port = port;
            Service service(std::move(docs), runner, config.workdir, sc);
            g_service = &service;
            std::signal(SIGINT, [](int) {
                if (g_service)
                    g_service->stop();
            });
            std::signal(SIGTERM, [](int) {
                if (g_service)
                    g_service->stop();
            });
            std::cerr << "serving " << config.bundle_dir().string() << " on " << host << ":" << port << "\n";
            if (!service.listen())
                throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
            g_service = nullptr;
        }
        return status;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.error_class());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

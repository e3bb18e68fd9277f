#include "explorable/service/pipeline.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/validate.hpp"
#include "explorable/depgraph/depgraph.hpp"
#include "explorable/formalizer/formalizer.hpp"
#include "explorable/linker/linker.hpp"
#include "explorable/templater/templater.hpp"

#include <regex>

namespace explorable {

ProofDocument formalize_document(const CorpusEntry &entry, GenerationProvider &provider, LeanRunner &runner,
                                 const PipelineConfig &config, StageLog &log)
{
    ProofDocument doc;
    doc.id = entry.id;
    doc.written = entry.written;
    auto workdir = config.workdir / "scratch" / entry.id;
    if (entry.imported_lean) {
        doc.lean = make_lean_source(*entry.imported_lean, runner.config().toolchain_id());
        auto compile = runner.compile(doc.lean, workdir);
        if (!compile.success)
            throw ExhaustedAttempts(0, "imported Lean proof does not compile:\n" + compile.summary());
        auto alignment = check_alignment(doc.written, doc.lean);
        if (!alignment.ok())
            log.warnings.push_back("imported proof is not aligned: " + alignment.summary());
        for (const auto &a : alignment.advisories)
            log.warnings.push_back(a);
    } else {
        auto result = generate_aligned_proof(doc.written, provider, config.formalize_attempts, runner, workdir, entry.id);
        doc.lean = std::move(result.source);
        if (result.attempts > 1)
            log.warnings.push_back("aligned proof accepted after " + std::to_string(result.attempts) + " attempts");
        for (const auto &a : result.alignment.advisories)
            log.warnings.push_back(a);
    }
    auto links = make_links(doc.written, doc.lean, provider, entry.id);
    doc.links = std::move(links.links);
    log.warnings.insert(log.warnings.end(), links.warnings.begin(), links.warnings.end());
    return doc;
}

void analyze_document(ProofDocument &doc, GenerationProvider &provider, LeanRunner &runner,
                      const PipelineConfig &config, StageLog &log)
{
    doc.graph = recover_graph(doc.lean, doc.links, runner, config.workdir / "scratch" / doc.id);
    for (const auto &w : doc.graph->warnings)
        log.warnings.push_back(to_string(w.kind) + ": " + w.message);
    doc.templates.clear();
    if (doc.written.oracle) {
        for (const auto &s : doc.written.steps)
            doc.templates[s.index] =
                generate_template(s, template_keys(doc, s.index), provider, config.template_attempts, doc.id);
    }
    auto report = validate_document(doc);
    for (const auto &v : report.violations)
        log.findings.push_back(v.path + ": " + v.message);
}

void precompute_document(ProofDocument &doc, LeanRunner &runner, const PipelineConfig &config,
                         const std::map<std::string, IntRange> &ranges, StageLog &)
{
    if (!doc.written.oracle)
        throw MissingOracle("document " + doc.id + " registers no oracle predicates");
    for (const auto &[var, _] : ranges)
        if (!doc.written.find_input(var))
            throw InvalidBinding("document " + doc.id + " has no input " + var);
    if (!doc.sweep_cache)
        doc.sweep_cache.emplace();
    ProbeContext ctx{runner, config.workdir};
    for (const auto &in : doc.written.inputs) {
        auto it = ranges.find(in.name);
        sweep(doc, in.name, it == ranges.end() ? in.default_range : it->second, *doc.sweep_cache, ctx);
    }
}

OracleCheckReport oracle_check(const ProofDocument &doc, const std::map<std::string, IntRange> &ranges,
                               LeanRunner &runner, const std::filesystem::path &workdir)
{
    if (!doc.written.oracle)
        throw MissingOracle("document " + doc.id + " registers no oracle predicates");
    std::vector<std::pair<std::string, IntRange>> axes;
    for (const auto &in : doc.written.inputs) {
        auto it = ranges.find(in.name);
        axes.emplace_back(in.name, it == ranges.end() ? IntRange{in.default_value, in.default_value} : it->second);
    }
    for (const auto &[var, _] : ranges)
        if (!doc.written.find_input(var))
            throw InvalidBinding("document " + doc.id + " has no input " + var);

    OracleCheckReport report;
    ProbeContext ctx{runner, workdir};
    for (const auto &[_, r] : axes)
        if (r.empty())
            return report;
    Binding b;
    for (const auto &[name, r] : axes)
        b.assignments[name] = r.lo;
    for (;;) {
        ++report.bindings;
        auto eval = evaluate_at(doc, b, ctx);
        report.accepted += eval.hypotheses_ok;
        auto found = find_disagreements(doc, eval);
        report.disagreements.insert(report.disagreements.end(), found.begin(), found.end());
        // Odometer over the axes.
        std::size_t i = 0;
        for (; i < axes.size(); ++i) {
            auto &v = b.assignments[axes[i].first];
            if (v < axes[i].second.hi) {
                ++v;
                break;
            }
            v = axes[i].second.lo;
        }
        if (i == axes.size())
            break;
    }
    return report;
}

RenderedEval render_eval(const ProofDocument &doc, const EvalResult &eval)
{
    RenderedEval out;
    out.eval = eval;
    std::map<int, const ProbeResult *> by_step;
    for (const auto &p : eval.per_step)
        by_step[p.step_index] = &p;
    for (const auto &[k, t] : doc.templates) {
        std::map<std::string, ReducedValue> values;
        for (const auto &[name, v] : eval.binding.assignments)
            values[name] = v;
        if (auto it = by_step.find(k); it != by_step.end())
            for (const auto &[name, v] : it->second->values)
                values[name] = v;
        try {
            out.step_text[k] = instantiate(t, values);
        } catch (const MissingKey &e) {
            out.render_errors[k] = e.what();
        }
    }
    return out;
}

std::pair<std::string, IntRange> parse_range_arg(const std::string &arg)
{
    static const std::regex re(R"(^(?:([A-Za-z_][A-Za-z0-9_']*)=)?(-?\d+)\.\.(-?\d+)$)");
    std::smatch m;
    if (!std::regex_match(arg, m, re))
        throw ConfigError("range '" + arg + "' is not of the form LO..HI or VAR=LO..HI");
    try {
        return {m[1].str(), IntRange{std::stoll(m[2].str()), std::stoll(m[3].str())}};
    } catch (const std::out_of_range &) {
        throw ConfigError("range '" + arg + "' is out of bounds");
    }
}

} // namespace explorable

#include "explorable/core/lean_structure.hpp"
#include "explorable/core/text.hpp"
#include "explorable/formalizer/formalizer.hpp"

namespace explorable {

ProofGenerationExhausted::ProofGenerationExhausted(int attempts, AlignmentReport alignment, CompileReport compile)
    : ExhaustedAttempts(attempts, compile.success ? "alignment: " + alignment.summary()
                                                  : "compile: " + compile.summary()),
      alignment_(std::move(alignment)), compile_(std::move(compile))
{
}

std::string extract_lean_code(const std::string &response)
{
    auto open = response.find("```lean");
    if (open == std::string::npos)
        open = response.find("```");
    if (open == std::string::npos)
        return response;
    auto body = response.find('\n', open);
    if (body == std::string::npos)
        return response;
    ++body;
    auto close = response.find("```", body);
    return response.substr(body, close == std::string::npos ? std::string::npos : close - body);
}

std::string numbered_steps(const WrittenProof &written)
{
    std::string out;
    for (const auto &s : written.steps)
        out += "Step " + std::to_string(s.index) + ": " + text::normalize_space(s.text) + "\n";
    return out;
}

GenerationResult generate_aligned_proof(const WrittenProof &written, GenerationProvider &provider, int max_attempts,
                                        LeanRunner &runner, const std::filesystem::path &workdir,
                                        const std::string &doc_id)
{
    if (max_attempts < 1)
        throw ConfigError("max_attempts must be at least 1");
    CompletionRequest req;
    req.purpose = "formalize";
    req.metadata["doc"] = doc_id;
    req.messages.push_back({"system", load_prompt("formalize")});
    req.messages.push_back({"user", fill_prompt(load_prompt("formalize_user"),
                                                {{"theorem", written.theorem_text}, {"steps", numbered_steps(written)}})});

    AlignmentReport last_alignment;
    CompileReport last_compile;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        req.metadata["attempt"] = std::to_string(attempt);
        std::string response = provider.complete(req);
        std::string code = extract_lean_code(response);
        LeanSource source = make_lean_source(code, runner.config().toolchain_id());

        last_compile = runner.compile(source, workdir);
        std::string alignment_text;
        try {
            last_alignment = check_alignment(written, source);
            alignment_text = last_alignment.ok() ? "none" : last_alignment.summary();
        } catch (const UnannotatedBlock &e) {
            last_alignment = AlignmentReport{};
            last_alignment.rule_have_ok = false;
            last_alignment.have_details.push_back(e.what());
            alignment_text = e.what();
        }
        if (last_compile.success && last_alignment.ok())
            return {std::move(source), last_alignment, last_compile, attempt};

        req.messages.push_back({"assistant", response});
        req.messages.push_back(
            {"user", fill_prompt(load_prompt("formalize_retry"),
                                 {{"diagnostics", last_compile.success ? "none" : last_compile.summary()},
                                  {"alignment", alignment_text}})});
    }
    throw ProofGenerationExhausted(max_attempts, last_alignment, last_compile);
}

} // namespace explorable

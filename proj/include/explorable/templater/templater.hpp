#pragma once

#include "explorable/core/types.hpp"
#include "explorable/formalizer/provider.hpp"

#include <map>
#include <set>
#include <string>

namespace explorable {

struct TemplateParse {
    std::set<std::string> keys;
    std::vector<std::string> problems; // unbalanced braces, malformed keys
};

// `{{key}}` placeholders; `\{{` is a literal `{{` and makes its closing `}}` literal too.
TemplateParse parse_template(const std::string &text);

WorkedTemplate make_template(int prose_step_index, std::string text);

ValidationReport validate_template(const WorkedTemplate &t, const std::set<std::string> &available_keys);

// Throws MissingKey naming every unresolved key.
std::string instantiate(const WorkedTemplate &t, const std::map<std::string, ReducedValue> &values);

// Regenerates until the template validates. Throws ExhaustedAttempts.
WorkedTemplate generate_template(const ProseStep &step, const std::set<std::string> &available_keys,
                                 GenerationProvider &provider, int max_attempts = 3, const std::string &doc_id = {});

// Keys a step's template may use: input variables and the Lean targets of its linked propositions.
std::set<std::string> template_keys(const ProofDocument &doc, int step_index);

} // namespace explorable

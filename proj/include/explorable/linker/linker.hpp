#pragma once

#include "explorable/core/types.hpp"
#include "explorable/formalizer/provider.hpp"

#include <string>
#include <vector>

namespace explorable {

struct LinkResult {
    LinkMap links;
    std::vector<std::string> warnings; // dropped provider proposals, validation warnings
};

// Block links from the `-- step k` annotations; variable links from the provider,
// keeping only targets that name something in the Lean proof.
LinkResult make_links(const WrittenProof &written, const LeanSource &lean, GenerationProvider &provider,
                      const std::string &doc_id = {});

ValidationReport validate_links(const LinkMap &links, const WrittenProof &written, const LeanSource &lean);

// Parses the provider's answer: a JSON array of {step, name, lean}, optionally fenced.
struct VarLinkProposal {
    int step = 0;
    std::string name;
    std::string lean;
};
std::vector<VarLinkProposal> parse_link_response(const std::string &response);

} // namespace explorable

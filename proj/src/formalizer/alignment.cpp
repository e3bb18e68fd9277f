#include "explorable/core/lean_structure.hpp"
#include "explorable/core/text.hpp"
#include "explorable/formalizer/formalizer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace explorable {

std::string AlignmentReport::summary() const
{
    std::ostringstream out;
    out << "rule_order_ok=" << rule_order_ok << " rule_have_ok=" << rule_have_ok << " rule_blocks_ok=" << rule_blocks_ok
        << " name_overlap=" << name_overlap << "\n";
    for (const auto *list : {&order_details, &have_details, &blocks_details, &advisories})
        for (const auto &d : *list)
            out << "  " << d << "\n";
    return out.str();
}

AlignmentReport check_alignment(const WrittenProof &written, const LeanSource &lean)
{
    auto layout = analyze_lean_layout(lean.full_text);
    if (!layout.unannotated_have_lines.empty()) {
        std::string lines;
        for (int l : layout.unannotated_have_lines)
            lines += (lines.empty() ? "" : ", ") + std::to_string(l);
        throw UnannotatedBlock("have statement outside any step comment at line(s) " + lines);
    }

    AlignmentReport r;
    const auto &blocks = layout.blocks;
    int n_steps = static_cast<int>(written.steps.size());

    for (const auto &b : blocks) {
        if (!b.binder_block && b.have_names.empty()) {
            r.rule_have_ok = false;
            r.have_details.push_back("block " + std::to_string(b.id) + " (step " + std::to_string(b.prose_step_index) +
                                     ", lines " + std::to_string(b.lines.first) + "-" + std::to_string(b.lines.last) +
                                     ") has no have statement");
        }
    }
    if (blocks.empty()) {
        r.rule_have_ok = false;
        r.have_details.push_back("the proof has no step blocks");
    }

    std::set<int> covered;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        int k = blocks[i].prose_step_index;
        if (k < 1 || k > n_steps) {
            r.rule_blocks_ok = false;
            r.blocks_details.push_back("block " + std::to_string(blocks[i].id) + " names step " + std::to_string(k) +
                                       " outside 1.." + std::to_string(n_steps));
        }
        if (i > 0 && k < blocks[i - 1].prose_step_index) {
            r.rule_blocks_ok = false;
            r.blocks_details.push_back("block " + std::to_string(blocks[i].id) + " (step " + std::to_string(k) +
                                       ") follows a block for step " + std::to_string(blocks[i - 1].prose_step_index));
        }
        covered.insert(k);
    }
    for (int k = 1; k <= n_steps; ++k) {
        if (!covered.count(k)) {
            r.rule_blocks_ok = false;
            r.blocks_details.push_back("step " + std::to_string(k) + " has no block");
        }
    }

    // Prose index of every have, in source order.
    std::vector<std::pair<std::string, int>> have_steps;
    for (const auto &t : layout.tactics) {
        if (!t.block_id)
            continue;
        const StepBlock *b = layout.block(*t.block_id);
        for (auto &h : have_names(t.text))
            have_steps.emplace_back(h, b->prose_step_index);
    }
    for (std::size_t i = 1; i < have_steps.size(); ++i) {
        if (have_steps[i].second < have_steps[i - 1].second) {
            r.rule_order_ok = false;
            r.order_details.push_back("have " + have_steps[i].first + " (step " + std::to_string(have_steps[i].second) +
                                      ") comes after " + have_steps[i - 1].first + " (step " +
                                      std::to_string(have_steps[i - 1].second) + ")");
        }
    }

    std::set<std::string> lean_ids;
    for (auto &tok : text::local_identifier_tokens(lean.full_text))
        lean_ids.insert(tok);
    std::set<std::string> prose;
    for (const auto &s : written.steps)
        for (const auto &p : s.propositions)
            prose.insert(p.name);
    for (const auto &name : prose)
        (lean_ids.count(name) ? r.matched_names : r.unmatched_names).push_back(name);
    r.name_overlap = prose.empty() ? 1.0 : static_cast<double>(r.matched_names.size()) / static_cast<double>(prose.size());
    if (r.name_overlap < name_overlap_advisory_threshold)
        r.advisories.push_back("name overlap " + std::to_string(r.name_overlap) +
                               " is low; the Lean proof may follow a different strategy than the prose");
    return r;
}

} // namespace explorable

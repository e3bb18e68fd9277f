#include "explorable/linker/linker.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace explorable {

namespace {

std::set<std::string> names_in(const LeanSource &lean)
{
    auto names = lean_names(analyze_lean_layout(lean.full_text));
    return {names.begin(), names.end()};
}

std::string steps_listing(const WrittenProof &written)
{
    std::string out;
    for (const auto &s : written.steps) {
        out += "Step " + std::to_string(s.index) + ": " + s.text + "\n";
        if (s.propositions.empty())
            continue;
        out += "  named:";
        for (const auto &p : s.propositions)
            out += " " + p.name;
        out += "\n";
    }
    return out;
}

const ProseStep *find_step(const WrittenProof &w, int index)
{
    for (const auto &s : w.steps)
        if (s.index == index)
            return &s;
    return nullptr;
}

bool has_proposition(const ProseStep &s, const std::string &name)
{
    return std::any_of(s.propositions.begin(), s.propositions.end(), [&](const auto &p) { return p.name == name; });
}

} // namespace

std::vector<VarLinkProposal> parse_link_response(const std::string &response)
{
    auto open = response.find('[');
    auto close = response.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ProviderHTTPError("link response holds no JSON array");
    auto j = nlohmann::json::parse(response.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw ProviderHTTPError("link response is not a JSON array");
    std::vector<VarLinkProposal> out;
    for (const auto &e : j) {
        if (!e.is_object() || !e.contains("step") || !e.contains("name") || !e.contains("lean"))
            continue;
        if (!e["step"].is_number_integer() || !e["name"].is_string() || !e["lean"].is_string())
            continue;
        out.push_back({e["step"].get<int>(), e["name"].get<std::string>(), e["lean"].get<std::string>()});
    }
    return out;
}

LinkResult make_links(const WrittenProof &written, const LeanSource &lean, GenerationProvider &provider,
                      const std::string &doc_id)
{
    LinkResult result;
    for (const auto &b : lean.step_blocks)
        result.links.block_links[b.prose_step_index].push_back(b.id);
    for (auto &[step, ids] : result.links.block_links)
        std::sort(ids.begin(), ids.end());
    for (const auto &s : written.steps)
        if (result.links.block_links[s.index].empty())
            throw UnlinkableStep("step " + std::to_string(s.index) + " has no Lean step block");
    // Drop entries for steps the prose does not have; validation reports the blocks as orphans.
    for (auto it = result.links.block_links.begin(); it != result.links.block_links.end();)
        it = find_step(written, it->first) ? std::next(it) : result.links.block_links.erase(it);

    bool any_named = std::any_of(written.steps.begin(), written.steps.end(),
                                 [](const auto &s) { return !s.propositions.empty(); });
    if (any_named) {
        auto names = names_in(lean);
        std::string listing;
        for (const auto &n : names)
            listing += (listing.empty() ? "" : ", ") + n;
        CompletionRequest req;
        req.purpose = "link";
        req.metadata["doc"] = doc_id;
        req.messages.push_back({"system", load_prompt("link")});
        req.messages.push_back({"user", fill_prompt(load_prompt("link_user"), {{"steps", steps_listing(written)},
                                                                               {"names", listing},
                                                                               {"lean", lean.full_text}})});
        for (const auto &p : parse_link_response(provider.complete(req))) {
            std::string what = "(" + std::to_string(p.step) + ", " + p.name + ") -> " + p.lean;
            const ProseStep *s = find_step(written, p.step);
            if (!s || !has_proposition(*s, p.name)) {
                result.warnings.push_back("dropped var link " + what + ": no such prose proposition");
            } else if (!names.count(p.lean)) {
                result.warnings.push_back("dropped var link " + what + ": name not in the Lean proof");
            } else if (!result.links.var_links.emplace(std::make_pair(p.step, p.name), p.lean).second) {
                result.warnings.push_back("dropped var link " + what + ": proposition already linked");
            }
        }
    }

    auto report = validate_links(result.links, written, lean);
    for (const auto &w : report.warnings)
        result.warnings.push_back(w.path + ": " + w.message);
    if (!report.ok())
        throw UnlinkableStep(report.violations.front().path + ": " + report.violations.front().message);
    return result;
}

ValidationReport validate_links(const LinkMap &links, const WrittenProof &written, const LeanSource &lean)
{
    ValidationReport r;
    std::set<int> block_ids;
    for (const auto &b : lean.step_blocks)
        block_ids.insert(b.id);

    std::map<int, std::set<int>> steps_of_block;
    for (const auto &s : written.steps) {
        auto it = links.block_links.find(s.index);
        if (it == links.block_links.end() || it->second.empty())
            r.violation("$.links.block_links[" + std::to_string(s.index) + "]",
                        "step " + std::to_string(s.index) + " has no block link");
    }
    for (const auto &[step, ids] : links.block_links) {
        std::string path = "$.links.block_links[" + std::to_string(step) + "]";
        if (!find_step(written, step))
            r.violation(path, "no prose step " + std::to_string(step));
        for (int id : ids) {
            if (!block_ids.count(id))
                r.violation(path, "no Lean step block " + std::to_string(id));
            steps_of_block[id].insert(step);
        }
    }
    for (const auto &[id, steps] : steps_of_block) {
        if (*steps.rbegin() - *steps.begin() + 1 != static_cast<int>(steps.size()))
            r.violation("$.links.block_links", "block " + std::to_string(id) + " is linked to non-adjacent steps");
    }
    for (int id : block_ids)
        if (!steps_of_block.count(id))
            r.warning("$.links.block_links", "block " + std::to_string(id) + " has no prose step");

    auto names = names_in(lean);
    std::map<std::string, std::set<std::string>> targets_of_prop;
    std::map<std::string, std::set<std::string>> props_of_target;
    for (const auto &[key, target] : links.var_links) {
        const auto &[step, name] = key;
        std::string path = "$.links.var_links[" + std::to_string(step) + "," + name + "]";
        const ProseStep *s = find_step(written, step);
        if (!s || !has_proposition(*s, name))
            r.violation(path, "no proposition " + name + " in step " + std::to_string(step));
        if (!names.count(target))
            r.violation(path, "target " + target + " does not occur in the Lean proof");
        targets_of_prop[name].insert(target);
        props_of_target[target].insert(name);
    }
    for (const auto &[name, targets] : targets_of_prop) {
        if (targets.size() > 1) {
            std::string list;
            for (const auto &t : targets)
                list += (list.empty() ? "" : ", ") + t;
            r.violation("$.links.var_links", "proposition " + name + " has several targets: " + list);
        }
    }
    for (const auto &[target, props] : props_of_target) {
        if (props.size() > 1) {
            std::string list;
            for (const auto &p : props)
                list += (list.empty() ? "" : ", ") + p;
            r.warning("$.links.var_links", "Lean name " + target + " aliases propositions " + list);
        }
    }
    return r;
}

} // namespace explorable

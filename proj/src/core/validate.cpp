#include "explorable/core/validate.hpp"

#include "explorable/core/lean_structure.hpp"
#include "explorable/core/text.hpp"

#include <set>

namespace explorable {

namespace {

std::string at(const std::string &path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

bool has_step(const WrittenProof &w, int k) { return k >= 1 && k <= static_cast<int>(w.steps.size()); }

} // namespace

ValidationReport validate_written(const WrittenProof &w, const std::string &path)
{
    ValidationReport r;
    if (w.steps.empty())
        r.violation(path + ".steps", "proof has no steps");
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const auto &s = w.steps[i];
        auto p = at(path + ".steps", i);
        if (s.index != static_cast<int>(i) + 1)
            r.violation(p + ".index", "expected index " + std::to_string(i + 1) + ", found " + std::to_string(s.index));
        std::set<std::string> names;
        for (std::size_t k = 0; k < s.propositions.size(); ++k) {
            const auto &prop = s.propositions[k];
            auto pp = at(p + ".propositions", k);
            if (prop.begin > prop.end || prop.end > s.text.size())
                r.violation(pp, "range [" + std::to_string(prop.begin) + ", " + std::to_string(prop.end) +
                                    ") outside step text of length " + std::to_string(s.text.size()));
            if (!names.insert(prop.name).second)
                r.violation(pp + ".name", "duplicate proposition name '" + prop.name + "'");
        }
    }
    std::set<std::string> inputs;
    for (std::size_t i = 0; i < w.inputs.size(); ++i) {
        const auto &v = w.inputs[i];
        auto p = at(path + ".inputs", i);
        if (!text::is_valid_identifier(v.name))
            r.violation(p + ".name", "'" + v.name + "' is not a valid identifier");
        else if (!text::references_name(w.theorem_text, v.name))
            r.violation(p + ".name", "'" + v.name + "' does not appear in theorem_text");
        if (!inputs.insert(v.name).second)
            r.violation(p + ".name", "duplicate input '" + v.name + "'");
        if (v.default_range.lo > v.default_range.hi)
            r.violation(p + ".default_range", "lower bound exceeds upper bound");
        if (v.domain == NumberDomain::natural && v.default_range.lo < 0)
            r.violation(p + ".default_range", "natural input with negative lower bound");
        if (v.domain == NumberDomain::natural && v.default_value < 0)
            r.violation(p + ".default_value", "natural input with negative default");
    }
    return r;
}

ValidationReport validate_lean(const LeanSource &l, const std::string &path)
{
    ValidationReport r;
    std::set<std::string> haves;
    for (std::size_t i = 0; i < l.step_blocks.size(); ++i) {
        const auto &b = l.step_blocks[i];
        auto p = at(path + ".step_blocks", i);
        if (b.prose_step_index < 1)
            r.violation(p + ".prose_step_index", "block carries no prose step index");
        if (b.lines.first < 1 || b.lines.first > b.lines.last)
            r.violation(p + ".lines", "invalid line range");
        if (i > 0 && b.lines.first <= l.step_blocks[i - 1].lines.last)
            r.violation(p + ".lines", "overlaps or precedes the previous block");
        if (b.id != static_cast<int>(i) + 1)
            r.violation(p + ".id", "block ids must be 1..N in order");
        for (const auto &h : b.have_names)
            if (!haves.insert(h).second)
                r.violation(p + ".have_names", "duplicate have name '" + h + "'");
    }
    return r;
}

ValidationReport validate_state(const ProofState &s, const std::string &path)
{
    ValidationReport r;
    std::set<std::string> names;
    for (std::size_t i = 0; i < s.hypotheses.size(); ++i)
        if (!names.insert(s.hypotheses[i].name).second)
            r.violation(at(path + ".hypotheses", i), "duplicate hypothesis name '" + s.hypotheses[i].name + "'");
    if (s.goal_text.empty() && !s.hypotheses.empty())
        r.violation(path + ".goal_text", "empty goal on a state that still has hypotheses");
    return r;
}

ValidationReport validate_graph(const FactGraph &g, const WrittenProof &w, const std::string &path)
{
    ValidationReport r;
    for (const auto &[name, n] : g.nodes) {
        auto p = path + ".nodes." + name;
        if (n.name != name)
            r.violation(p + ".name", "node key and name differ");
        if (n.prose_step_index && !has_step(w, *n.prose_step_index))
            r.violation(p + ".prose_step_index", "references missing prose step " + std::to_string(*n.prose_step_index));
        if (!n.prose_step_index && !n.axiom)
            r.violation(p, "node has neither a step label nor the axiom flag");
    }
    for (const auto &[from, to] : g.edges) {
        auto p = path + ".edges[" + from + "->" + to + "]";
        auto f = g.nodes.find(from);
        auto t = g.nodes.find(to);
        if (f == g.nodes.end() || t == g.nodes.end()) {
            r.violation(p, "edge endpoint is not a node");
            continue;
        }
        if (f->second.order >= t->second.order)
            r.violation(p, "edge does not point forward in introduction order");
        if (f->second.prose_step_index && t->second.prose_step_index &&
            *f->second.prose_step_index > *t->second.prose_step_index)
            r.violation(p, "edge runs from a later step to an earlier one");
    }
    for (std::size_t i = 0; i < g.states.size(); ++i)
        r.merge(validate_state(g.states[i], at(path + ".states", i)));
    const auto &m = g.step_maps;
    auto check_key = [&](int k, const std::string &p) {
        if (!has_step(w, k))
            r.violation(p, "references missing prose step " + std::to_string(k));
    };
    for (const auto &[k, links] : m.relies_on) {
        check_key(k, path + ".step_maps.relies_on." + std::to_string(k));
        for (const auto &l : links) {
            check_key(l.step, path + ".step_maps.relies_on." + std::to_string(k));
            auto it = m.used_by.find(l.step);
            bool found = false;
            if (it != m.used_by.end())
                for (int u : it->second)
                    found = found || u == k;
            if (!found)
                r.violation(path + ".step_maps.used_by." + std::to_string(l.step),
                            "missing " + std::to_string(k) + " (transpose of relies_on)");
        }
    }
    for (const auto &[k, users] : m.used_by) {
        check_key(k, path + ".step_maps.used_by." + std::to_string(k));
        for (int u : users) {
            auto it = m.relies_on.find(u);
            bool found = false;
            if (it != m.relies_on.end())
                for (const auto &l : it->second)
                    found = found || l.step == k;
            if (!found)
                r.violation(path + ".step_maps.relies_on." + std::to_string(u),
                            "missing " + std::to_string(k) + " (transpose of used_by)");
        }
    }
    std::set<std::string> introduced;
    for (const auto &[k, facts] : m.introduces) {
        check_key(k, path + ".step_maps.introduces." + std::to_string(k));
        for (const auto &f : facts)
            if (!introduced.insert(f).second)
                r.violation(path + ".step_maps.introduces." + std::to_string(k), "fact '" + f + "' introduced by two steps");
    }
    for (const auto &[k, _] : m.consumes)
        check_key(k, path + ".step_maps.consumes." + std::to_string(k));
    return r;
}

ValidationReport validate_document(const ProofDocument &doc)
{
    ValidationReport r;
    if (doc.id.empty())
        r.violation("$.id", "empty document id");
    r.merge(validate_written(doc.written));
    r.merge(validate_lean(doc.lean));

    const auto &w = doc.written;
    const auto &l = doc.lean;
    std::set<int> block_ids;
    for (const auto &b : l.step_blocks)
        block_ids.insert(b.id);
    for (const auto &s : w.steps) {
        auto it = doc.links.block_links.find(s.index);
        if (it == doc.links.block_links.end() || it->second.empty())
            r.violation("$.links.block_links." + std::to_string(s.index), "prose step has no block link");
    }
    for (const auto &[k, ids] : doc.links.block_links) {
        auto p = "$.links.block_links." + std::to_string(k);
        if (!has_step(w, k))
            r.violation(p, "references missing prose step " + std::to_string(k));
        for (int id : ids)
            if (!block_ids.count(id))
                r.violation(p, "references missing block " + std::to_string(id));
    }
    auto names = lean_names(analyze_lean_layout(l.full_text));
    std::set<std::string> known(names.begin(), names.end());
    for (const auto &b : l.step_blocks)
        known.insert(b.have_names.begin(), b.have_names.end());
    for (const auto &[key, target] : doc.links.var_links) {
        auto p = "$.links.var_links[" + std::to_string(key.first) + "," + key.second + "]";
        if (!has_step(w, key.first))
            r.violation(p, "references missing prose step " + std::to_string(key.first));
        if (!known.count(target))
            r.violation(p, "link target '" + target + "' is not a Lean have name or binder");
    }

    if (doc.graph)
        r.merge(validate_graph(*doc.graph, w));
    for (const auto &[k, t] : doc.templates) {
        auto p = "$.templates." + std::to_string(k);
        if (!has_step(w, k))
            r.violation(p, "template keyed by missing prose step " + std::to_string(k));
        if (t.prose_step_index != k)
            r.violation(p + ".prose_step_index", "does not match its key");
    }
    if (doc.sweep_cache) {
        for (const auto &[var, s] : doc.sweep_cache->sweeps) {
            auto p = "$.sweep_cache.sweeps." + var;
            if (!w.find_input(var))
                r.violation(p, "sweep over unknown input '" + var + "'");
            if (s.entries.size() != s.range.size())
                r.violation(p + ".entries", "expected one entry per value in range");
            for (std::size_t i = 0; i < s.entries.size() && i < s.range.size(); ++i)
                if (s.entries[i].value != s.range.lo + static_cast<std::int64_t>(i))
                    r.violation(at(p + ".entries", i) + ".value", "out of sequence");
        }
        for (const auto &[key, e] : doc.sweep_cache->evals) {
            auto p = "$.sweep_cache.evals." + key;
            if (e.binding.key() != key)
                r.violation(p, "key does not match binding");
            for (const auto &[name, _] : e.binding.assignments)
                if (!w.find_input(name))
                    r.violation(p + ".binding", "assigns unknown input '" + name + "'");
            for (const auto &pr : e.per_step)
                if (e.break_step && pr.step_index < *e.break_step && !pr.closed)
                    r.violation(p + ".break_step", "an earlier probe is not closed");
        }
    }
    return r;
}

} // namespace explorable

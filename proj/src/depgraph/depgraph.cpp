#include "explorable/depgraph/depgraph.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <climits>
#include <queue>
#include <sstream>

namespace explorable {

namespace {

std::string head_word(std::string_view tactic)
{
    auto t = text::trim(tactic);
    std::size_t i = 0;
    while (i < t.size() && !std::isspace(static_cast<unsigned char>(t[i])) && t[i] != '[' && t[i] != '(')
        ++i;
    return std::string(t.substr(0, i));
}

// Proof part of `have h : T := proof`, with a leading `by` removed.
std::string proof_part(std::string_view tactic)
{
    int depth = 0;
    std::size_t at = std::string_view::npos;
    for (std::size_t i = 0; i + 1 < tactic.size(); ++i) {
        char c = tactic[i];
        if (c == '(' || c == '[' || c == '{')
            ++depth;
        else if (c == ')' || c == ']' || c == '}')
            --depth;
        else if (depth == 0 && c == ':' && tactic[i + 1] == '=') {
            at = i + 2;
            break;
        }
    }
    if (at == std::string_view::npos)
        return {};
    auto p = text::trim(tactic.substr(at));
    if (text::starts_with(p, "by ") || p == "by" || text::starts_with(p, "by\n"))
        p = text::trim(p.substr(2));
    return std::string(p);
}

bool reflexive_equality(const std::string &type)
{
    int depth = 0;
    for (std::size_t i = 0; i < type.size(); ++i) {
        char c = type[i];
        if (c == '(' || c == '[')
            ++depth;
        else if (c == ')' || c == ']')
            --depth;
        else if (depth == 0 && c == '=' && (i == 0 || (type[i - 1] != '<' && type[i - 1] != '>' && type[i - 1] != '!' &&
                                                        type[i - 1] != ':')) &&
                 (i + 1 >= type.size() || type[i + 1] != '=')) {
            return text::normalize_space(type.substr(0, i)) == text::normalize_space(type.substr(i + 1));
        }
    }
    return false;
}

bool is_bookkeeping(const FactNode &n, const ArtifactSets &sets)
{
    if (n.axiom || !reflexive_equality(n.type_text))
        return false;
    if (sets.bookkeeping.count(head_word(n.origin_tactic)))
        return true;
    return sets.bookkeeping.count(head_word(proof_part(n.origin_tactic))) > 0;
}

std::vector<const FactNode *> in_order(const FactGraph &g)
{
    std::vector<const FactNode *> out;
    for (const auto &[_, n] : g.nodes)
        out.push_back(&n);
    std::sort(out.begin(), out.end(), [](auto *a, auto *b) { return a->order < b->order; });
    return out;
}

} // namespace

StateDelta diff_states(const ProofState &prev, const ProofState &next, const std::string &tactic_text)
{
    StateDelta d;
    d.tactic_text = tactic_text;
    for (const auto &h : next.hypotheses)
        if (!prev.find(h.name))
            d.introduced.push_back(h.name);
    // Closing the last goal drops its context; nothing is revoked.
    if (!next.terminal())
        for (const auto &h : prev.hypotheses)
            if (!next.find(h.name))
                d.revoked.push_back(h.name);
    d.goal_changed = prev.goal_text != next.goal_text;
    if (!d.revoked.empty())
        d.note = text::join(d.revoked, ", ") + " removed by `" + text::normalize_space(tactic_text) + "`";
    return d;
}

FactGraph build_fact_graph(const std::vector<ProofState> &states, const std::vector<std::string> &tactics,
                           const LinkMap &links, const LeanSource &lean, const ArtifactSets &sets)
{
    if (states.size() != tactics.size() + 1)
        throw ConfigError("build_fact_graph needs one more state than tactics (" + std::to_string(states.size()) +
                          " states, " + std::to_string(tactics.size()) + " tactics)");
    FactGraph g;
    g.states = states;

    auto layout = analyze_lean_layout(lean.full_text);
    std::map<int, int> step_of_block;
    for (const auto &[step, ids] : links.block_links)
        for (int id : ids)
            if (!step_of_block.count(id) || step < step_of_block[id])
                step_of_block[id] = step;
    for (const auto &b : lean.step_blocks)
        step_of_block.emplace(b.id, b.prose_step_index);

    std::optional<int> binder_step;
    for (const auto &b : lean.step_blocks)
        if (b.binder_block)
            binder_step = step_of_block[b.id];
    std::optional<int> first_step;
    if (!links.block_links.empty())
        first_step = links.block_links.begin()->first;

    // Tactic i -> layout tactic, matched in order by normalized text.
    std::vector<std::optional<int>> block_of(tactics.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < tactics.size(); ++i) {
        auto want = text::normalize_space(tactics[i]);
        for (std::size_t j = cursor; j < layout.tactics.size(); ++j) {
            if (text::normalize_space(layout.tactics[j].text) == want) {
                block_of[i] = layout.tactics[j].block_id;
                cursor = j + 1;
                break;
            }
        }
    }

    int order = 0;
    for (const auto &h : states.front().hypotheses) {
        FactNode n;
        n.name = h.name;
        n.type_text = h.type_text;
        n.axiom = true;
        n.prose_step_index = binder_step;
        n.order = order++;
        g.nodes[h.name] = n;
    }

    std::optional<int> current = binder_step ? binder_step : first_step;
    for (std::size_t i = 0; i < tactics.size(); ++i) {
        if (block_of[i] && step_of_block.count(*block_of[i]))
            current = step_of_block[*block_of[i]];
        auto delta = diff_states(states[i], states[i + 1], tactics[i]);
        TacticTransition t;
        t.tactic_text = tactics[i];
        t.step = current;
        t.goal_changed = delta.goal_changed;
        t.discharged = !states[i].terminal() && states[i + 1].terminal();
        for (const auto &name : delta.revoked) {
            if (auto it = g.nodes.find(name); it != g.nodes.end())
                it->second.inactive = true;
            g.warnings.push_back({WarningKind::hypothesis_revoked, name, current,
                                  name + " removed by `" + text::normalize_space(tactics[i]) + "`"});
        }
        int tactic_first = order;
        for (const auto &name : delta.introduced) {
            const Hypothesis *h = states[i + 1].find(name);
            FactNode n;
            n.name = name;
            n.type_text = h ? h->type_text : "";
            n.prose_step_index = current;
            n.origin_tactic = tactics[i];
            n.order = order++;
            if (auto old = g.nodes.find(name); old != g.nodes.end()) {
                // Shadowing: the newer fact takes the name.
                g.nodes.erase(old);
                for (auto it = g.edges.begin(); it != g.edges.end();)
                    it = (it->first == name || it->second == name) ? g.edges.erase(it) : std::next(it);
            }
            for (const auto *f : in_order(g)) {
                bool earlier_tactic = f->order < tactic_first;
                if ((earlier_tactic && text::references_name(n.origin_tactic, f->name)) ||
                    text::references_name(n.type_text, f->name))
                    g.edges.insert({f->name, name});
            }
            g.nodes[name] = std::move(n);
            t.introduced.push_back(name);
        }
        g.transitions.push_back(std::move(t));
    }

    for (auto &[_, n] : g.nodes)
        n.bookkeeping = is_bookkeeping(n, sets);
    topological_order(g);
    g.step_maps = step_maps(g);
    auto artifacts = detect_artifacts(g, sets);
    g.warnings.insert(g.warnings.end(), artifacts.begin(), artifacts.end());
    return g;
}

std::vector<std::string> topological_order(const FactGraph &graph)
{
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> out;
    for (const auto &[name, _] : graph.nodes)
        indegree[name] = 0;
    for (const auto &[from, to] : graph.edges) {
        if (!graph.nodes.count(from) || !graph.nodes.count(to))
            throw CycleDetected("edge " + from + " -> " + to + " has an endpoint that is not a node");
        ++indegree[to];
        out[from].push_back(to);
    }
    auto later = [&](const std::string &a, const std::string &b) {
        return graph.nodes.at(a).order > graph.nodes.at(b).order;
    };
    std::priority_queue<std::string, std::vector<std::string>, decltype(later)> ready(later);
    for (const auto &[name, d] : indegree)
        if (d == 0)
            ready.push(name);
    std::vector<std::string> order;
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(n);
        for (const auto &m : out[n])
            if (--indegree[m] == 0)
                ready.push(m);
    }
    if (order.size() != graph.nodes.size()) {
        std::string stuck;
        for (const auto &[name, d] : indegree)
            if (d > 0)
                stuck += (stuck.empty() ? "" : ", ") + name;
        throw CycleDetected("facts on a cycle: " + stuck);
    }
    return order;
}

FourMaps step_maps(const FactGraph &graph)
{
    FourMaps m;
    for (const auto &[name, n] : graph.nodes)
        if (n.prose_step_index)
            m.introduces[*n.prose_step_index].insert(name);

    std::map<int, std::map<int, std::set<std::string>>> relies; // step -> earlier step -> facts
    for (const auto &[from, to] : graph.edges) {
        const auto &f = graph.nodes.at(from);
        const auto &t = graph.nodes.at(to);
        if (!t.prose_step_index)
            continue;
        int k = *t.prose_step_index;
        bool earlier = f.prose_step_index && *f.prose_step_index < k;
        if (!earlier && !f.axiom)
            continue;
        if (f.axiom && f.prose_step_index && *f.prose_step_index == k)
            continue;
        m.consumes[k].insert(from);
        if (f.prose_step_index && *f.prose_step_index < k)
            relies[k][*f.prose_step_index].insert(from);
    }
    for (const auto &[k, by_step] : relies) {
        for (const auto &[j, facts] : by_step) {
            m.relies_on[k].push_back({j, std::vector<std::string>(facts.begin(), facts.end())});
            m.used_by[j].push_back(k);
        }
    }
    for (auto &[_, users] : m.used_by)
        std::sort(users.begin(), users.end());
    return m;
}

std::vector<GraphWarning> detect_artifacts(const FactGraph &graph, const ArtifactSets &sets)
{
    std::vector<GraphWarning> out;
    for (const auto *n : in_order(graph)) {
        if (is_bookkeeping(*n, sets))
            out.push_back({WarningKind::bookkeeping_node, n->name, n->prose_step_index,
                           "fact " + n->name + " : " + n->type_text + " comes from bookkeeping tactic `" +
                               text::normalize_space(n->origin_tactic) + "`"});
    }
    std::map<int, bool> introduces_any;
    for (const auto &[_, n] : graph.nodes)
        if (n.prose_step_index && !n.axiom)
            introduces_any[*n.prose_step_index] = true;
    std::set<int> reported;
    for (const auto &t : graph.transitions) {
        if (!t.step || introduces_any[*t.step] || reported.count(*t.step) || !t.discharged)
            continue;
        if (!sets.closing.count(head_word(t.tactic_text)))
            continue;
        reported.insert(*t.step);
        out.push_back({WarningKind::closing_tactic_gap, text::normalize_space(t.tactic_text), t.step,
                       "step " + std::to_string(*t.step) + " closes the goal with `" + head_word(t.tactic_text) +
                           "` and introduces no fact, so its dependencies are invisible"});
    }
    return out;
}

std::string to_dot(const FactGraph &graph, const std::string &name)
{
    auto quote = [](const std::string &s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '\n') {
                q += "\\n";
                continue;
            }
            if (c == '"' || c == '\\')
                q += '\\';
            q += c;
        }
        return q + "\"";
    };
    std::ostringstream out;
    out << "digraph " << quote(name) << " {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto *n : in_order(graph)) {
        std::string label = n->name + " : " + n->type_text;
        if (n->prose_step_index)
            label += "\nstep " + std::to_string(*n->prose_step_index);
        out << "  " << quote(n->name) << " [label=" << quote(label);
        if (n->axiom)
            out << ", shape=ellipse";
        if (n->bookkeeping)
            out << ", style=dashed";
        if (n->inactive)
            out << ", color=gray";
        out << "];\n";
    }
    for (const auto &[from, to] : graph.edges)
        out << "  " << quote(from) << " -> " << quote(to) << ";\n";
    out << "}\n";
    return out.str();
}

std::vector<int> downstream_steps(const FactGraph &graph, const std::string &fact)
{
    auto it = graph.nodes.find(fact);
    if (it == graph.nodes.end())
        throw NotFound("no fact named " + fact);
    std::set<std::string> seen{fact};
    std::vector<std::string> work{fact};
    std::set<int> steps;
    while (!work.empty()) {
        auto cur = work.back();
        work.pop_back();
        for (const auto &[from, to] : graph.edges) {
            if (from != cur || !seen.insert(to).second)
                continue;
            work.push_back(to);
            const auto &n = graph.nodes.at(to);
            if (n.prose_step_index && (!it->second.prose_step_index || *n.prose_step_index > *it->second.prose_step_index))
                steps.insert(*n.prose_step_index);
        }
    }
    return {steps.begin(), steps.end()};
}

FactGraph recover_graph(const LeanSource &lean, const LinkMap &links, LeanRunner &runner,
                        const std::filesystem::path &workdir, const ArtifactSets &sets)
{
    auto layout = analyze_lean_layout(lean.full_text);
    if (!layout.tactic_proof())
        throw PositionOutsideProof("the Lean proof is not a tactic block");
    std::vector<SourcePosition> positions;
    std::vector<std::string> tactics;
    for (const auto &t : layout.tactics) {
        positions.push_back(t.start);
        tactics.push_back(t.text);
    }
    positions.push_back({layout.proof_last_line, INT_MAX / 2});
    auto states = runner.goal_states(lean, positions, workdir);
    return build_fact_graph(states, tactics, links, lean, sets);
}

GoldGraph GoldGraph::from_json_text(const std::string &text)
{
    GoldGraph g;
    try {
        auto j = nlohmann::json::parse(text);
        for (const auto &[key, v] : j.at("steps").items()) {
            GoldStep s;
            for (int r : v.value("required", std::vector<int>{}))
                s.required.insert(r);
            for (int o : v.value("optional", std::vector<int>{}))
                s.optional.insert(o);
            g.steps[std::stoi(key)] = s;
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("gold graph: ") + e.what());
    } catch (const std::logic_error &e) {
        throw ConfigError(std::string("gold graph: step keys must be integers (") + e.what() + ")");
    }
    return g;
}

GoldScore score_against_gold(const FourMaps &maps, const GoldGraph &gold)
{
    GoldScore score;
    auto list = [](const std::set<int> &s) {
        std::string out = "{";
        for (int v : s)
            out += (out.size() > 1 ? "," : "") + std::to_string(v);
        return out + "}";
    };
    for (const auto &[k, g] : gold.steps) {
        std::set<int> got;
        if (auto it = maps.relies_on.find(k); it != maps.relies_on.end())
            for (const auto &l : it->second)
                got.insert(l.step);
        std::set<int> allowed = g.required;
        allowed.insert(g.optional.begin(), g.optional.end());
        bool exact = got == allowed;
        bool correct = std::includes(got.begin(), got.end(), g.required.begin(), g.required.end()) &&
                       std::includes(allowed.begin(), allowed.end(), got.begin(), got.end());
        ++score.steps;
        score.exact += exact;
        score.correct += correct;
        score.details.push_back("step " + std::to_string(k) + ": recovered " + list(got) + ", required " +
                                list(g.required) + ", optional " + list(g.optional) +
                                (exact ? " exact" : correct ? " partial" : " wrong"));
    }
    return score;
}

} // namespace explorable

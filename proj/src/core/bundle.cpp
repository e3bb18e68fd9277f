#include "explorable/core/bundle.hpp"

#include "explorable/core/errors.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <unistd.h>

namespace explorable {

using nlohmann::json;

namespace {

// ---- encoding ------------------------------------------------------------

json opt_int(const std::optional<int> &v) { return v ? json(*v) : json(nullptr); }

json encode(const InputVar &v)
{
    return {{"name", v.name},
            {"domain", to_string(v.domain)},
            {"default_range", {v.default_range.lo, v.default_range.hi}},
            {"default_value", v.default_value}};
}

json encode(const StepBlock &b)
{
    return {{"id", b.id},
            {"prose_step_index", b.prose_step_index},
            {"lines", {b.lines.first, b.lines.last}},
            {"have_names", b.have_names},
            {"binder_block", b.binder_block}};
}

json encode(const LeanSource &l)
{
    json blocks = json::array();
    for (const auto &b : l.step_blocks)
        blocks.push_back(encode(b));
    return {{"full_text", l.full_text}, {"theorem_name", l.theorem_name}, {"toolchain", l.toolchain}, {"step_blocks", blocks}};
}

json encode(const FactNode &n)
{
    return {{"name", n.name},
            {"type_text", n.type_text},
            {"prose_step_index", opt_int(n.prose_step_index)},
            {"origin_tactic", n.origin_tactic},
            {"axiom", n.axiom},
            {"bookkeeping", n.bookkeeping},
            {"inactive", n.inactive},
            {"order", n.order}};
}

json encode(const GraphWarning &w)
{
    return {{"kind", to_string(w.kind)}, {"subject", w.subject}, {"step", opt_int(w.step)}, {"message", w.message}};
}

json encode(const TacticTransition &t)
{
    return {{"tactic_text", t.tactic_text},
            {"step", opt_int(t.step)},
            {"introduced", t.introduced},
            {"goal_changed", t.goal_changed},
            {"discharged", t.discharged}};
}

json encode(const ProbeResult &p)
{
    json values = json::object();
    for (const auto &[k, v] : p.values)
        values[k] = to_json(v);
    return {{"step_index", p.step_index}, {"closed", p.closed}, {"values", values}};
}

json encode(const SweepEntry &e)
{
    return {{"value", e.value},
            {"hypotheses_ok", e.hypotheses_ok},
            {"conclusion_holds", e.conclusion_holds},
            {"break_step", opt_int(e.break_step)}};
}

json encode(const SweepCache &c)
{
    json sweeps = json::object();
    for (const auto &[var, s] : c.sweeps)
        sweeps[var] = to_json(s);
    json evals = json::object();
    for (const auto &[key, e] : c.evals)
        evals[key] = to_json(e);
    return {{"sweeps", sweeps}, {"evals", evals}};
}

// ---- decoding ------------------------------------------------------------

class Reader {
public:
    explicit Reader(std::vector<std::string> &warnings) : warnings_(warnings) {}

    const json &field(const json &obj, const char *key, const std::string &path) const
    {
        auto it = obj.find(key);
        if (it == obj.end())
            throw MalformedBundle(path + "." + key, "missing field");
        return *it;
    }

    const json &object(const json &v, const std::string &path, std::initializer_list<const char *> known) const
    {
        if (!v.is_object())
            throw MalformedBundle(path, "expected object");
        for (const auto &[k, _] : v.items()) {
            bool ok = false;
            for (const char *kn : known)
                ok = ok || k == kn;
            if (!ok)
                warnings_.push_back("ignored unknown field " + path + "." + k);
        }
        return v;
    }

    const json &array(const json &v, const std::string &path) const
    {
        if (!v.is_array())
            throw MalformedBundle(path, "expected array");
        return v;
    }

    std::string str(const json &v, const std::string &path) const
    {
        if (!v.is_string())
            throw MalformedBundle(path, "expected string");
        return v.get<std::string>();
    }

    std::int64_t integer(const json &v, const std::string &path) const
    {
        if (!v.is_number_integer())
            throw MalformedBundle(path, "expected integer");
        return v.get<std::int64_t>();
    }

    int small_int(const json &v, const std::string &path) const { return static_cast<int>(integer(v, path)); }

    bool boolean(const json &v, const std::string &path) const
    {
        if (!v.is_boolean())
            throw MalformedBundle(path, "expected boolean");
        return v.get<bool>();
    }

    std::optional<int> opt_int(const json &v, const std::string &path) const
    {
        if (v.is_null())
            return std::nullopt;
        return small_int(v, path);
    }

    std::vector<std::string> strings(const json &v, const std::string &path) const
    {
        std::vector<std::string> out;
        const auto &a = array(v, path);
        for (std::size_t i = 0; i < a.size(); ++i)
            out.push_back(str(a[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

    int map_key(const std::string &k, const std::string &path) const
    {
        try {
            std::size_t used = 0;
            int v = std::stoi(k, &used);
            if (used == k.size())
                return v;
        }
        catch (const std::exception &) {
        }
        throw MalformedBundle(path + "." + k, "expected integer key");
    }

private:
    std::vector<std::string> &warnings_;
};

WrittenProof decode_written(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"theorem_text", "leading", "steps", "inputs", "oracle"});
    WrittenProof w;
    w.theorem_text = r.str(r.field(j, "theorem_text", path), path + ".theorem_text");
    w.leading = j.contains("leading") ? r.str(j["leading"], path + ".leading") : std::string();
    const auto &steps = r.array(r.field(j, "steps", path), path + ".steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        auto p = path + ".steps[" + std::to_string(i) + "]";
        r.object(steps[i], p, {"index", "text", "trailing", "propositions"});
        ProseStep s;
        s.index = r.small_int(r.field(steps[i], "index", p), p + ".index");
        s.text = r.str(r.field(steps[i], "text", p), p + ".text");
        s.trailing = steps[i].contains("trailing") ? r.str(steps[i]["trailing"], p + ".trailing") : std::string();
        if (steps[i].contains("propositions")) {
            const auto &props = r.array(steps[i]["propositions"], p + ".propositions");
            for (std::size_t k = 0; k < props.size(); ++k) {
                auto pp = p + ".propositions[" + std::to_string(k) + "]";
                r.object(props[k], pp, {"name", "begin", "end"});
                s.propositions.push_back({r.str(r.field(props[k], "name", pp), pp + ".name"),
                                          static_cast<std::size_t>(r.integer(r.field(props[k], "begin", pp), pp + ".begin")),
                                          static_cast<std::size_t>(r.integer(r.field(props[k], "end", pp), pp + ".end"))});
            }
        }
        w.steps.push_back(std::move(s));
    }
    const auto &inputs = r.array(r.field(j, "inputs", path), path + ".inputs");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto p = path + ".inputs[" + std::to_string(i) + "]";
        r.object(inputs[i], p, {"name", "domain", "default_range", "default_value"});
        InputVar v;
        v.name = r.str(r.field(inputs[i], "name", p), p + ".name");
        auto dom = r.str(r.field(inputs[i], "domain", p), p + ".domain");
        if (dom == "integer")
            v.domain = NumberDomain::integer;
        else if (dom == "natural")
            v.domain = NumberDomain::natural;
        else
            throw MalformedBundle(p + ".domain", "unknown number domain '" + dom + "'");
        const auto &range = r.array(r.field(inputs[i], "default_range", p), p + ".default_range");
        if (range.size() != 2)
            throw MalformedBundle(p + ".default_range", "expected [lo, hi]");
        v.default_range = {r.integer(range[0], p + ".default_range[0]"), r.integer(range[1], p + ".default_range[1]")};
        v.default_value = r.integer(r.field(inputs[i], "default_value", p), p + ".default_value");
        w.inputs.push_back(std::move(v));
    }
    if (j.contains("oracle") && !j["oracle"].is_null()) {
        auto p = path + ".oracle";
        r.object(j["oracle"], p, {"hypothesis", "conclusion"});
        w.oracle = OraclePredicates{r.str(r.field(j["oracle"], "hypothesis", p), p + ".hypothesis"),
                                    r.str(r.field(j["oracle"], "conclusion", p), p + ".conclusion")};
    }
    return w;
}

LeanSource decode_lean(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"full_text", "theorem_name", "toolchain", "step_blocks"});
    LeanSource l;
    l.full_text = r.str(r.field(j, "full_text", path), path + ".full_text");
    l.theorem_name = r.str(r.field(j, "theorem_name", path), path + ".theorem_name");
    l.toolchain = j.contains("toolchain") ? r.str(j["toolchain"], path + ".toolchain") : std::string();
    const auto &blocks = r.array(r.field(j, "step_blocks", path), path + ".step_blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto p = path + ".step_blocks[" + std::to_string(i) + "]";
        r.object(blocks[i], p, {"id", "prose_step_index", "lines", "have_names", "binder_block"});
        StepBlock b;
        b.id = r.small_int(r.field(blocks[i], "id", p), p + ".id");
        b.prose_step_index = r.small_int(r.field(blocks[i], "prose_step_index", p), p + ".prose_step_index");
        const auto &lines = r.array(r.field(blocks[i], "lines", p), p + ".lines");
        if (lines.size() != 2)
            throw MalformedBundle(p + ".lines", "expected [first, last]");
        b.lines = {r.small_int(lines[0], p + ".lines[0]"), r.small_int(lines[1], p + ".lines[1]")};
        b.have_names = r.strings(r.field(blocks[i], "have_names", p), p + ".have_names");
        b.binder_block = blocks[i].contains("binder_block") && r.boolean(blocks[i]["binder_block"], p + ".binder_block");
        l.step_blocks.push_back(std::move(b));
    }
    return l;
}

LinkMap decode_links(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"block_links", "var_links"});
    LinkMap m;
    const auto &bl = r.field(j, "block_links", path);
    if (!bl.is_object())
        throw MalformedBundle(path + ".block_links", "expected object");
    for (const auto &[k, v] : bl.items()) {
        auto p = path + ".block_links." + k;
        std::vector<int> ids;
        const auto &a = r.array(v, p);
        for (std::size_t i = 0; i < a.size(); ++i)
            ids.push_back(r.small_int(a[i], p + "[" + std::to_string(i) + "]"));
        m.block_links[r.map_key(k, path + ".block_links")] = std::move(ids);
    }
    const auto &vl = r.array(r.field(j, "var_links", path), path + ".var_links");
    for (std::size_t i = 0; i < vl.size(); ++i) {
        auto p = path + ".var_links[" + std::to_string(i) + "]";
        r.object(vl[i], p, {"step", "proposition", "lean"});
        m.var_links[{r.small_int(r.field(vl[i], "step", p), p + ".step"), r.str(r.field(vl[i], "proposition", p), p + ".proposition")}] =
            r.str(r.field(vl[i], "lean", p), p + ".lean");
    }
    return m;
}

ReducedValue decode_value(const Reader &r, const json &v, const std::string &path)
{
    if (v.is_boolean())
        return v.get<bool>();
    if (v.is_number_integer())
        return v.get<std::int64_t>();
    r.object(v, path, {"symbolic"});
    return SymbolicValue{r.str(r.field(v, "symbolic", path), path + ".symbolic")};
}

template <typename F>
void each_map_entry(const Reader &r, const json &obj, const std::string &path, F &&f)
{
    if (!obj.is_object())
        throw MalformedBundle(path, "expected object");
    for (const auto &[k, v] : obj.items())
        f(k, v, path + "." + k);
    (void)r;
}

EvalResult decode_eval(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"binding", "hypotheses_ok", "conclusion_holds", "break_step", "per_step"});
    EvalResult e;
    each_map_entry(r, r.field(j, "binding", path), path + ".binding",
                   [&](const std::string &k, const json &v, const std::string &p) { e.binding.assignments[k] = r.integer(v, p); });
    e.hypotheses_ok = r.boolean(r.field(j, "hypotheses_ok", path), path + ".hypotheses_ok");
    const auto &ch = r.field(j, "conclusion_holds", path);
    if (!ch.is_null())
        e.conclusion_holds = r.boolean(ch, path + ".conclusion_holds");
    e.break_step = r.opt_int(r.field(j, "break_step", path), path + ".break_step");
    const auto &ps = r.array(r.field(j, "per_step", path), path + ".per_step");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto p = path + ".per_step[" + std::to_string(i) + "]";
        r.object(ps[i], p, {"step_index", "closed", "values"});
        ProbeResult pr;
        pr.step_index = r.small_int(r.field(ps[i], "step_index", p), p + ".step_index");
        pr.closed = r.boolean(r.field(ps[i], "closed", p), p + ".closed");
        each_map_entry(r, r.field(ps[i], "values", p), p + ".values",
                       [&](const std::string &k, const json &v, const std::string &vp) { pr.values[k] = decode_value(r, v, vp); });
        e.per_step.push_back(std::move(pr));
    }
    return e;
}

Sweep decode_sweep(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"variable", "range", "entries"});
    Sweep s;
    s.variable = r.str(r.field(j, "variable", path), path + ".variable");
    const auto &range = r.array(r.field(j, "range", path), path + ".range");
    if (range.size() != 2)
        throw MalformedBundle(path + ".range", "expected [lo, hi]");
    s.range = {r.integer(range[0], path + ".range[0]"), r.integer(range[1], path + ".range[1]")};
    const auto &entries = r.array(r.field(j, "entries", path), path + ".entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto p = path + ".entries[" + std::to_string(i) + "]";
        r.object(entries[i], p, {"value", "hypotheses_ok", "conclusion_holds", "break_step"});
        s.entries.push_back({r.integer(r.field(entries[i], "value", p), p + ".value"),
                             r.boolean(r.field(entries[i], "hypotheses_ok", p), p + ".hypotheses_ok"),
                             r.boolean(r.field(entries[i], "conclusion_holds", p), p + ".conclusion_holds"),
                             r.opt_int(r.field(entries[i], "break_step", p), p + ".break_step")});
    }
    return s;
}

ProofState decode_state(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"position", "hypotheses", "goal_text"});
    ProofState s;
    const auto &pos = r.array(r.field(j, "position", path), path + ".position");
    if (pos.size() != 2)
        throw MalformedBundle(path + ".position", "expected [line, column]");
    s.position = {r.small_int(pos[0], path + ".position[0]"), r.small_int(pos[1], path + ".position[1]")};
    const auto &hyps = r.array(r.field(j, "hypotheses", path), path + ".hypotheses");
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        auto p = path + ".hypotheses[" + std::to_string(i) + "]";
        r.object(hyps[i], p, {"name", "type_text"});
        s.hypotheses.push_back({r.str(r.field(hyps[i], "name", p), p + ".name"), r.str(r.field(hyps[i], "type_text", p), p + ".type_text")});
    }
    s.goal_text = r.str(r.field(j, "goal_text", path), path + ".goal_text");
    return s;
}

FactGraph decode_graph(const Reader &r, const json &j, const std::string &path)
{
    r.object(j, path, {"nodes", "edges", "transitions", "states", "step_maps", "warnings"});
    FactGraph g;
    const auto &nodes = r.array(r.field(j, "nodes", path), path + ".nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto p = path + ".nodes[" + std::to_string(i) + "]";
        const auto &o = r.object(nodes[i], p, {"name", "type_text", "prose_step_index", "origin_tactic", "axiom", "bookkeeping", "inactive", "order"});
        FactNode n;
        n.name = r.str(r.field(o, "name", p), p + ".name");
        n.type_text = r.str(r.field(o, "type_text", p), p + ".type_text");
        n.prose_step_index = r.opt_int(r.field(o, "prose_step_index", p), p + ".prose_step_index");
        n.origin_tactic = r.str(r.field(o, "origin_tactic", p), p + ".origin_tactic");
        n.axiom = r.boolean(r.field(o, "axiom", p), p + ".axiom");
        n.bookkeeping = r.boolean(r.field(o, "bookkeeping", p), p + ".bookkeeping");
        n.inactive = r.boolean(r.field(o, "inactive", p), p + ".inactive");
        n.order = r.small_int(r.field(o, "order", p), p + ".order");
        g.nodes[n.name] = std::move(n);
    }
    const auto &edges = r.array(r.field(j, "edges", path), path + ".edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto p = path + ".edges[" + std::to_string(i) + "]";
        auto pair = r.strings(edges[i], p);
        if (pair.size() != 2)
            throw MalformedBundle(p, "expected [from, to]");
        g.edges.insert({pair[0], pair[1]});
    }
    const auto &trs = r.array(r.field(j, "transitions", path), path + ".transitions");
    for (std::size_t i = 0; i < trs.size(); ++i) {
        auto p = path + ".transitions[" + std::to_string(i) + "]";
        const auto &o = r.object(trs[i], p, {"tactic_text", "step", "introduced", "goal_changed", "discharged"});
        g.transitions.push_back({r.str(r.field(o, "tactic_text", p), p + ".tactic_text"), r.opt_int(r.field(o, "step", p), p + ".step"),
                                 r.strings(r.field(o, "introduced", p), p + ".introduced"),
                                 r.boolean(r.field(o, "goal_changed", p), p + ".goal_changed"),
                                 r.boolean(r.field(o, "discharged", p), p + ".discharged")});
    }
    const auto &sts = r.array(r.field(j, "states", path), path + ".states");
    for (std::size_t i = 0; i < sts.size(); ++i)
        g.states.push_back(decode_state(r, sts[i], path + ".states[" + std::to_string(i) + "]"));
    const auto &sm = r.object(r.field(j, "step_maps", path), path + ".step_maps", {"relies_on", "used_by", "consumes", "introduces"});
    auto sp = path + ".step_maps";
    each_map_entry(r, r.field(sm, "relies_on", sp), sp + ".relies_on", [&](const std::string &k, const json &v, const std::string &p) {
        std::vector<StepLink> links;
        const auto &a = r.array(v, p);
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto lp = p + "[" + std::to_string(i) + "]";
            r.object(a[i], lp, {"step", "facts"});
            links.push_back({r.small_int(r.field(a[i], "step", lp), lp + ".step"), r.strings(r.field(a[i], "facts", lp), lp + ".facts")});
        }
        g.step_maps.relies_on[r.map_key(k, sp + ".relies_on")] = std::move(links);
    });
    each_map_entry(r, r.field(sm, "used_by", sp), sp + ".used_by", [&](const std::string &k, const json &v, const std::string &p) {
        std::vector<int> steps;
        const auto &a = r.array(v, p);
        for (std::size_t i = 0; i < a.size(); ++i)
            steps.push_back(r.small_int(a[i], p + "[" + std::to_string(i) + "]"));
        g.step_maps.used_by[r.map_key(k, sp + ".used_by")] = std::move(steps);
    });
    each_map_entry(r, r.field(sm, "consumes", sp), sp + ".consumes", [&](const std::string &k, const json &v, const std::string &p) {
        auto names = r.strings(v, p);
        g.step_maps.consumes[r.map_key(k, sp + ".consumes")] = {names.begin(), names.end()};
    });
    each_map_entry(r, r.field(sm, "introduces", sp), sp + ".introduces", [&](const std::string &k, const json &v, const std::string &p) {
        auto names = r.strings(v, p);
        g.step_maps.introduces[r.map_key(k, sp + ".introduces")] = {names.begin(), names.end()};
    });
    const auto &ws = r.array(r.field(j, "warnings", path), path + ".warnings");
    for (std::size_t i = 0; i < ws.size(); ++i) {
        auto p = path + ".warnings[" + std::to_string(i) + "]";
        const auto &o = r.object(ws[i], p, {"kind", "subject", "step", "message"});
        GraphWarning w;
        auto kind = r.str(r.field(o, "kind", p), p + ".kind");
        if (kind == "BookkeepingNode")
            w.kind = WarningKind::bookkeeping_node;
        else if (kind == "ClosingTacticGap")
            w.kind = WarningKind::closing_tactic_gap;
        else if (kind == "HypothesisRevoked")
            w.kind = WarningKind::hypothesis_revoked;
        else
            throw MalformedBundle(p + ".kind", "unknown warning kind '" + kind + "'");
        w.subject = r.str(r.field(o, "subject", p), p + ".subject");
        w.step = r.opt_int(r.field(o, "step", p), p + ".step");
        w.message = r.str(r.field(o, "message", p), p + ".message");
        g.warnings.push_back(std::move(w));
    }
    return g;
}

} // namespace

json to_json(const ReducedValue &v)
{
    if (const auto *i = std::get_if<std::int64_t>(&v))
        return *i;
    if (const auto *b = std::get_if<bool>(&v))
        return *b;
    return {{"symbolic", std::get<SymbolicValue>(v).text}};
}

json to_json(const WrittenProof &w)
{
    json steps = json::array();
    for (const auto &s : w.steps) {
        json props = json::array();
        for (const auto &p : s.propositions)
            props.push_back({{"name", p.name}, {"begin", p.begin}, {"end", p.end}});
        steps.push_back({{"index", s.index}, {"text", s.text}, {"trailing", s.trailing}, {"propositions", props}});
    }
    json inputs = json::array();
    for (const auto &v : w.inputs)
        inputs.push_back(encode(v));
    json j = {{"theorem_text", w.theorem_text}, {"leading", w.leading}, {"steps", steps}, {"inputs", inputs}};
    if (w.oracle)
        j["oracle"] = {{"hypothesis", w.oracle->hypothesis}, {"conclusion", w.oracle->conclusion}};
    return j;
}

json to_json(const LinkMap &l)
{
    json block_links = json::object();
    for (const auto &[step, ids] : l.block_links)
        block_links[std::to_string(step)] = ids;
    json var_links = json::array();
    for (const auto &[key, target] : l.var_links)
        var_links.push_back({{"step", key.first}, {"proposition", key.second}, {"lean", target}});
    return {{"block_links", block_links}, {"var_links", var_links}};
}

json to_json(const FourMaps &m)
{
    json relies = json::object();
    for (const auto &[step, links] : m.relies_on) {
        json a = json::array();
        for (const auto &l : links)
            a.push_back({{"step", l.step}, {"facts", l.facts}});
        relies[std::to_string(step)] = a;
    }
    json used = json::object();
    for (const auto &[step, steps] : m.used_by)
        used[std::to_string(step)] = steps;
    json consumes = json::object();
    for (const auto &[step, facts] : m.consumes)
        consumes[std::to_string(step)] = facts;
    json introduces = json::object();
    for (const auto &[step, facts] : m.introduces)
        introduces[std::to_string(step)] = facts;
    return {{"relies_on", relies}, {"used_by", used}, {"consumes", consumes}, {"introduces", introduces}};
}

json to_json(const FactGraph &g)
{
    json nodes = json::array();
    for (const auto &[_, n] : g.nodes)
        nodes.push_back(encode(n));
    json edges = json::array();
    for (const auto &[from, to] : g.edges)
        edges.push_back({from, to});
    json transitions = json::array();
    for (const auto &t : g.transitions)
        transitions.push_back(encode(t));
    json states = json::array();
    for (const auto &st : g.states)
        states.push_back(to_json(st));
    json warnings = json::array();
    for (const auto &w : g.warnings)
        warnings.push_back(encode(w));
    return {{"nodes", nodes}, {"edges", edges}, {"transitions", transitions}, {"states", states}, {"step_maps", to_json(g.step_maps)}, {"warnings", warnings}};
}

json to_json(const EvalResult &e)
{
    json per_step = json::array();
    for (const auto &p : e.per_step)
        per_step.push_back(encode(p));
    return {{"binding", e.binding.assignments},
            {"hypotheses_ok", e.hypotheses_ok},
            {"conclusion_holds", e.conclusion_holds ? json(*e.conclusion_holds) : json(nullptr)},
            {"break_step", opt_int(e.break_step)},
            {"per_step", per_step}};
}

json to_json(const Sweep &s)
{
    json entries = json::array();
    for (const auto &e : s.entries)
        entries.push_back(encode(e));
    return {{"variable", s.variable}, {"range", {s.range.lo, s.range.hi}}, {"entries", entries}};
}

json to_json(const WorkedTemplate &t)
{
    return {{"prose_step_index", t.prose_step_index}, {"template_text", t.template_text}, {"keys", t.keys}};
}

json to_json(const ProofState &s)
{
    json hyps = json::array();
    for (const auto &h : s.hypotheses)
        hyps.push_back({{"name", h.name}, {"type_text", h.type_text}});
    return {{"position", {s.position.line, s.position.column}}, {"hypotheses", hyps}, {"goal_text", s.goal_text}};
}

json to_json(const ProofDocument &doc)
{
    json templates = json::object();
    for (const auto &[step, t] : doc.templates)
        templates[std::to_string(step)] = to_json(t);
    return {{"schema_version", bundle_schema_version},
            {"id", doc.id},
            {"written", to_json(doc.written)},
            {"lean", encode(doc.lean)},
            {"links", to_json(doc.links)},
            {"graph", doc.graph ? to_json(*doc.graph) : json(nullptr)},
            {"templates", templates},
            {"sweep_cache", doc.sweep_cache ? encode(*doc.sweep_cache) : json(nullptr)}};
}

LoadedBundle from_json(const json &j)
{
    LoadedBundle out;
    Reader r(out.warnings);
    const std::string root = "$";
    r.object(j, root, {"schema_version", "id", "written", "lean", "links", "graph", "templates", "sweep_cache"});
    auto version = r.integer(r.field(j, "schema_version", root), "$.schema_version");
    if (version != bundle_schema_version)
        throw SchemaVersionMismatch("bundle has schema_version " + std::to_string(version) + ", expected " +
                                    std::to_string(bundle_schema_version));
    auto &doc = out.doc;
    doc.id = r.str(r.field(j, "id", root), "$.id");
    doc.written = decode_written(r, r.field(j, "written", root), "$.written");
    doc.lean = decode_lean(r, r.field(j, "lean", root), "$.lean");
    doc.links = decode_links(r, r.field(j, "links", root), "$.links");
    if (j.contains("graph") && !j["graph"].is_null())
        doc.graph = decode_graph(r, j["graph"], "$.graph");
    if (j.contains("templates")) {
        each_map_entry(r, j["templates"], "$.templates", [&](const std::string &k, const json &v, const std::string &p) {
            r.object(v, p, {"prose_step_index", "template_text", "keys"});
            WorkedTemplate t;
            t.prose_step_index = r.small_int(r.field(v, "prose_step_index", p), p + ".prose_step_index");
            t.template_text = r.str(r.field(v, "template_text", p), p + ".template_text");
            auto keys = r.strings(r.field(v, "keys", p), p + ".keys");
            t.keys = {keys.begin(), keys.end()};
            doc.templates[r.map_key(k, "$.templates")] = std::move(t);
        });
    }
    if (j.contains("sweep_cache") && !j["sweep_cache"].is_null()) {
        const auto &sc = r.object(j["sweep_cache"], "$.sweep_cache", {"sweeps", "evals"});
        SweepCache cache;
        each_map_entry(r, r.field(sc, "sweeps", "$.sweep_cache"), "$.sweep_cache.sweeps",
                       [&](const std::string &k, const json &v, const std::string &p) { cache.sweeps[k] = decode_sweep(r, v, p); });
        each_map_entry(r, r.field(sc, "evals", "$.sweep_cache"), "$.sweep_cache.evals",
                       [&](const std::string &k, const json &v, const std::string &p) { cache.evals[k] = decode_eval(r, v, p); });
        doc.sweep_cache = std::move(cache);
    }
    return out;
}

std::string serialize_bundle(const ProofDocument &doc) { return to_json(doc).dump(2) + "\n"; }

LoadedBundle parse_bundle(const std::string &text)
{
    json j;
    try {
        j = json::parse(text);
    }
    catch (const json::parse_error &e) {
        throw MalformedBundle("$", e.what());
    }
    return from_json(j);
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw ConfigError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NotFound("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_bundle(const ProofDocument &doc, const std::filesystem::path &path) { write_file_atomic(path, serialize_bundle(doc)); }

LoadedBundle load_bundle(const std::filesystem::path &path) { return parse_bundle(read_file(path)); }

} // namespace explorable

#include "explorable/prober/prober.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/text.hpp"
#include "explorable/formalizer/provider.hpp"
#include "explorable/leanref/expr.hpp"
#include "explorable/prober/oracle.hpp"

#include <algorithm>
#include <future>
#include <regex>
#include <set>

namespace explorable {

namespace {

bool is_number_type(const std::string &t)
{
    auto s = text::trim_copy(t);
    return s == "ℤ" || s == "ℕ" || s == "Int" || s == "Nat";
}

// Offset just past the top-level `:=`, or npos.
std::size_t proof_start(std::string_view tac)
{
    int depth = 0;
    for (std::size_t i = 0; i + 1 < tac.size(); ++i) {
        char c = tac[i];
        if (c == '(' || c == '[' || c == '{')
            ++depth;
        else if (c == ')' || c == ']' || c == '}')
            --depth;
        else if (depth == 0 && c == ':' && tac[i + 1] == '=')
            return i;
    }
    return std::string_view::npos;
}

struct Definition {
    std::string var;
    std::string hyp;
};

// `obtain ⟨v, h⟩ : ∃ v ..., v = e := ...`
std::optional<Definition> definition_of(const std::string &tac)
{
    static const std::regex re(R"(^obtain\s*⟨\s*([^,\s⟩]+)\s*,\s*([^,\s⟩]+)\s*⟩\s*:\s*∃\s*([^,\s:]+)[^,]*,\s*([^=\s]+)\s*=)");
    std::smatch m;
    if (!std::regex_search(tac, m, re) || m[1] != m[3] || m[1] != m[4])
        return std::nullopt;
    return Definition{m[1], m[2]};
}

struct Copy {
    std::string text; // one tactic, possibly several lines, indented by 2
    std::vector<std::string> facts;
    std::optional<Definition> def;
};

Copy copy_tactic(const std::string &tactic, bool wrap)
{
    Copy c;
    std::string one = text::normalize_space(tactic);
    std::string prefix = wrap ? "  try " : "  ";
    if (text::starts_with(one, "obtain")) {
        c.text = prefix + one + "\n";
        c.def = definition_of(one);
    } else {
        auto at = proof_start(one);
        std::string head = text::trim_copy(one.substr(0, at));
        c.text = prefix + head + " := by\n    subst_vars\n    try simp\n    try rfl\n";
    }
    c.facts = have_names(tactic);
    return c;
}

std::string binding_hash(const Binding &b)
{
    return sha256_hex(b.key()).substr(0, 16);
}

std::optional<std::int64_t> numeral(const leanref::ExprPtr &e)
{
    using leanref::Kind;
    if (e->kind == Kind::num)
        return e->value;
    if (e->kind == Kind::neg && e->args.size() == 1)
        if (auto v = numeral(e->args[0]))
            return -*v;
    if (e->kind == Kind::cast && e->args.size() == 1)
        return numeral(e->args[0]);
    return std::nullopt;
}

ReducedValue reduce(const std::string &type_text, std::string *key)
{
    using namespace leanref;
    ExprPtr e;
    try {
        e = parse_expr(type_text);
    } catch (const ParseError &) {
        return SymbolicValue{text::normalize_space(type_text)};
    }
    if (e->kind == Kind::binop && e->name == "=" && e->args[0]->kind == Kind::var) {
        if (auto v = numeral(e->args[1])) {
            *key = e->args[0]->name;
            return *v;
        }
    }
    std::vector<std::string> free;
    free_vars(e, free);
    if (free.empty()) {
        try {
            return eval_prop(e, Env{});
        } catch (const EvalFailure &) {
        } catch (const TypeError &) {
        }
    }
    return SymbolicValue{text::normalize_space(type_text)};
}

} // namespace

Binding default_binding(const WrittenProof &written)
{
    Binding b;
    for (const auto &in : written.inputs)
        b.assignments[in.name] = in.default_value;
    return b;
}

void check_binding(const WrittenProof &written, const Binding &binding)
{
    for (const auto &in : written.inputs) {
        auto it = binding.assignments.find(in.name);
        if (it == binding.assignments.end())
            throw InvalidBinding("no value for input " + in.name);
        if (in.domain == NumberDomain::natural && it->second < 0)
            throw InvalidBinding(in.name + " is a natural number, got " + std::to_string(it->second));
    }
    for (const auto &[name, _] : binding.assignments)
        if (!written.find_input(name))
            throw InvalidBinding("unknown input " + name);
}

std::string make_probe(const LeanSource &lean, int step_index, const Binding &binding)
{
    auto layout = analyze_lean_layout(lean.full_text);
    std::map<int, int> step_of_block;
    for (const auto &b : layout.blocks)
        step_of_block[b.id] = b.prose_step_index;
    if (std::none_of(layout.blocks.begin(), layout.blocks.end(),
                     [&](const StepBlock &b) { return b.prose_step_index == step_index; }))
        throw ConfigError("the Lean proof has no block for step " + std::to_string(step_index));

    std::vector<Copy> copies;
    for (const auto &t : layout.tactics) {
        auto head = text::trim_copy(t.text);
        if (!text::starts_with(head, "have ") && !text::starts_with(head, "obtain"))
            continue;
        int step = t.block_id ? step_of_block[*t.block_id] : 0;
        if (step > step_index)
            break;
        copies.push_back(copy_tactic(t.text, step < step_index));
    }

    std::vector<Binder> vars;
    for (const auto &b : layout.binders)
        if (is_number_type(b.type_text))
            vars.push_back(b);
    std::string header = "example";
    for (const auto &v : vars) {
        bool used = std::any_of(copies.begin(), copies.end(),
                                [&](const Copy &c) { return text::references_name(c.text, v.name); });
        auto it = binding.assignments.find(v.name);
        if (it == binding.assignments.end()) {
            if (used)
                throw UnboundInput("step " + std::to_string(step_index) + " uses " + v.name + ", which the binding does not fix");
            continue;
        }
        header += " (" + v.name + " : " + text::trim_copy(v.type_text) + ") (hbind_" + v.name + " : " + v.name + " = " +
                  std::to_string(it->second) + ")";
    }
    header += " : True := by\n";

    std::string out = header;
    std::vector<Definition> defs;
    std::vector<std::string> facts;
    for (const auto &c : copies) {
        out += c.text;
        out += "  trace_state\n";
        if (c.def) {
            defs.push_back(*c.def);
        } else {
            facts.insert(facts.end(), c.facts.begin(), c.facts.end());
        }
    }
    for (const auto &v : vars)
        if (binding.assignments.count(v.name))
            out += "  subst hbind_" + v.name + "\n";
    for (std::size_t j = 0; j < defs.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i)
            out += "  try rw [" + defs[i].hyp + "] at " + defs[j].hyp + "\n";
        out += "  try norm_num [Finset.sum_range_succ] at " + defs[j].hyp + "\n";
    }
    for (const auto &f : facts)
        for (const auto &d : defs)
            out += "  try rw [" + d.hyp + "] at " + f + "\n";
    out += "  trace_state\n  trivial\n  trace_state\n";
    return out;
}

std::map<std::string, ReducedValue> extract_values(const ProbeOutcome &outcome, const LinkMap &)
{
    std::map<std::string, ReducedValue> values;
    const ProofState *last = nullptr;
    for (const auto &s : outcome.raw_states)
        if (!s.terminal())
            last = &s;
    if (!last)
        return values;
    for (const auto &h : last->hypotheses) {
        if (is_number_type(h.type_text) || h.type_text == "Prop" || h.type_text == "Type")
            continue;
        std::string key = h.name;
        auto v = reduce(h.type_text, &key);
        values[key] = v;
    }
    return values;
}

std::pair<bool, bool> oracle_eval(const ProofDocument &doc, const Binding &binding)
{
    if (!doc.written.oracle)
        throw MissingOracle("document " + doc.id + " registers no oracle predicates");
    auto hyp = oracle::Program::compile(doc.written.oracle->hypothesis);
    auto concl = oracle::Program::compile(doc.written.oracle->conclusion);
    return {hyp.holds(binding.assignments), concl.holds(binding.assignments)};
}

std::filesystem::path probe_dir(const std::filesystem::path &workdir, const std::string &doc_id, const Binding &binding)
{
    return workdir / "probes" / (doc_id.empty() ? "doc" : doc_id) / binding_hash(binding);
}

EvalResult evaluate_at(const ProofDocument &doc, const Binding &binding, ProbeContext &ctx)
{
    check_binding(doc.written, binding);
    EvalResult r;
    r.binding = binding;
    auto [hyp, concl] = oracle_eval(doc, binding);
    r.hypotheses_ok = hyp;
    r.conclusion_holds = concl;

    auto dir = probe_dir(ctx.workdir, doc.id, binding);
    std::vector<std::future<ProbeOutcome>> jobs;
    for (const auto &s : doc.written.steps) {
        auto source = make_probe(doc.lean, s.index, binding);
        jobs.push_back(std::async(std::launch::async, [&ctx, dir, source, k = s.index] {
            return ctx.runner.run_probe(source, dir, k);
        }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto outcome = jobs[i].get();
        ProbeResult p;
        p.step_index = doc.written.steps[i].index;
        p.closed = outcome.closed;
        p.values = extract_values(outcome, doc.links);
        for (const auto &[name, v] : binding.assignments)
            p.values[name] = v;
        if (!p.closed && !r.break_step)
            r.break_step = p.step_index;
        r.per_step.push_back(std::move(p));
    }
    return r;
}

Sweep sweep(const ProofDocument &doc, const std::string &var, IntRange range, SweepCache &cache, ProbeContext &ctx,
            std::size_t cap)
{
    const InputVar *in = doc.written.find_input(var);
    if (!in)
        throw InvalidBinding("unknown input " + var);
    if (range.size() > cap)
        throw RangeTooLarge(std::to_string(range.size()) + " values requested, the cap is " + std::to_string(cap));
    if (auto it = cache.sweeps.find(var); it != cache.sweeps.end() && it->second.range == range)
        return it->second;

    Sweep s;
    s.variable = var;
    s.range = range;
    Binding base = default_binding(doc.written);
    for (std::int64_t v = range.lo; !range.empty() && v <= range.hi; ++v) {
        Binding b = base;
        b.assignments[var] = v;
        check_binding(doc.written, b);
        auto key = b.key();
        auto hit = cache.evals.find(key);
        if (hit == cache.evals.end())
            hit = cache.evals.emplace(key, evaluate_at(doc, b, ctx)).first;
        const auto &e = hit->second;
        s.entries.push_back({v, e.hypotheses_ok, e.conclusion_holds.value_or(false), e.break_step});
    }
    cache.sweeps[var] = s;
    return s;
}

std::vector<Disagreement> find_disagreements(const ProofDocument &, const EvalResult &eval)
{
    std::vector<Disagreement> out;
    if (!eval.hypotheses_ok)
        return out;
    if (eval.break_step)
        out.push_back({eval.binding, "hypotheses hold but the proof breaks at step " + std::to_string(*eval.break_step)});
    if (eval.conclusion_holds && !*eval.conclusion_holds)
        out.push_back({eval.binding, "hypotheses hold but the oracle rejects the conclusion"});
    return out;
}

} // namespace explorable

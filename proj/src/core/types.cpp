#include "explorable/core/types.hpp"

namespace explorable {

std::string WrittenProof::proof_text() const
{
    std::string out = leading;
    for (const auto &s : steps) {
        out += s.text;
        out += s.trailing;
    }
    return out;
}

const InputVar *WrittenProof::find_input(const std::string &name) const
{
    for (const auto &v : inputs)
        if (v.name == name)
            return &v;
    return nullptr;
}

const Hypothesis *ProofState::find(const std::string &name) const
{
    for (const auto &h : hypotheses)
        if (h.name == name)
            return &h;
    return nullptr;
}

std::string Binding::key() const
{
    std::string out;
    for (const auto &[name, value] : assignments) {
        if (!out.empty())
            out += ',';
        out += name + "=" + std::to_string(value);
    }
    return out;
}

void ValidationReport::merge(const ValidationReport &other)
{
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

std::string to_string(NumberDomain d) { return d == NumberDomain::integer ? "integer" : "natural"; }

std::string to_string(WarningKind k)
{
    switch (k) {
    case WarningKind::bookkeeping_node:
        return "BookkeepingNode";
    case WarningKind::closing_tactic_gap:
        return "ClosingTacticGap";
    case WarningKind::hypothesis_revoked:
        return "HypothesisRevoked";
    }
    return "Unknown";
}

std::string render_value(const ReducedValue &v)
{
    if (const auto *i = std::get_if<std::int64_t>(&v))
        return std::to_string(*i);
    if (const auto *b = std::get_if<bool>(&v))
        return *b ? "true" : "false";
    return std::get<SymbolicValue>(v).text;
}

} // namespace explorable

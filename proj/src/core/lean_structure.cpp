#include "explorable/core/lean_structure.hpp"

#include "explorable/core/text.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace explorable {

namespace {

bool is_comment(std::string_view line) { return text::starts_with(text::trim(line), "--"); }
bool is_blank(std::string_view line) { return text::trim(line).empty(); }

std::string strip_try(std::string_view s)
{
    s = text::trim(s);
    while (text::starts_with(s, "try ")) {
        s.remove_prefix(4);
        s = text::trim(s);
        if (text::starts_with(s, "(")) {
            s.remove_prefix(1);
            s = text::trim(s);
        }
    }
    return std::string(s);
}

// Splits the signature (without the leading keyword and name) into binder groups and the statement.
void parse_signature(std::string_view sig, LeanLayout &layout)
{
    int depth = 0;
    std::size_t i = 0;
    std::string closing;
    while (i < sig.size()) {
        char c = sig[i];
        if (depth == 0 && (c == '(' || c == '{' || c == '[')) {
            char close = c == '(' ? ')' : c == '{' ? '}' : ']';
            int d = 0;
            std::size_t j = i;
            for (; j < sig.size(); ++j) {
                if (sig[j] == c)
                    ++d;
                else if (sig[j] == close && --d == 0)
                    break;
            }
            auto inner = sig.substr(i + 1, j - i - 1);
            auto colon = inner.find(" : ");
            if (colon != std::string_view::npos && c != '[') {
                auto names = text::normalize_space(inner.substr(0, colon));
                auto type = text::normalize_space(inner.substr(colon + 3));
                std::size_t p = 0;
                while (p < names.size()) {
                    auto q = names.find(' ', p);
                    if (q == std::string::npos)
                        q = names.size();
                    layout.binders.push_back({names.substr(p, q - p), type});
                    p = q + 1;
                }
            }
            i = j + 1;
            continue;
        }
        if (depth == 0 && c == ':' && (i + 1 >= sig.size() || sig[i + 1] != '=')) {
            auto rest = sig.substr(i + 1);
            auto assign = rest.rfind(":=");
            layout.statement = text::normalize_space(rest.substr(0, assign));
            return;
        }
        ++i;
    }
}

std::vector<std::string> pattern_names(std::string_view pat)
{
    std::vector<std::string> out;
    for (auto &tok : text::local_identifier_tokens(pat))
        if (tok != "_" && tok != "rfl")
            out.push_back(tok);
    return out;
}

} // namespace

std::optional<int> parse_step_comment(std::string_view line)
{
    static const std::regex re(R"(^--\s*step\s+(\d+)\b.*$)");
    std::string t(text::trim(line));
    std::smatch m;
    if (std::regex_match(t, m, re))
        return std::stoi(m[1]);
    return std::nullopt;
}

std::vector<std::string> have_names(std::string_view tactic_text)
{
    auto first_line = text::split_lines(tactic_text);
    if (first_line.empty())
        return {};
    auto s = strip_try(first_line.front());
    std::vector<std::string> out;
    if (text::starts_with(s, "have ")) {
        auto rest = text::trim(std::string_view(s).substr(5));
        if (text::starts_with(rest, ":")) {
            out.emplace_back("this");
            return out;
        }
        auto toks = text::local_identifier_tokens(rest);
        if (!toks.empty() && text::starts_with(rest, toks.front()))
            out.push_back(toks.front());
    }
    else if (text::starts_with(s, "obtain ")) {
        auto open = s.find("⟨");
        auto close = s.rfind("⟩", s.find(" :") == std::string::npos ? std::string::npos : s.find(" :"));
        if (open != std::string::npos && close != std::string::npos && close > open)
            out = pattern_names(std::string_view(s).substr(open, close - open));
    }
    return out;
}

std::vector<std::string> introduced_names(std::string_view tactic_text)
{
    auto out = have_names(tactic_text);
    auto lines = text::split_lines(tactic_text);
    if (lines.empty())
        return out;
    auto s = strip_try(lines.front());
    if (text::starts_with(s, "intro ") || text::starts_with(s, "intros ")) {
        auto toks = text::local_identifier_tokens(std::string_view(s).substr(s.find(' ')));
        for (auto &t : toks)
            if (t != "_")
                out.push_back(t);
    }
    return out;
}

const StepBlock *LeanLayout::block(int id) const
{
    for (const auto &b : blocks)
        if (b.id == id)
            return &b;
    return nullptr;
}

std::optional<int> LeanLayout::block_at(int line) const
{
    for (const auto &b : blocks)
        if (b.lines.contains(line))
            return b.id;
    return std::nullopt;
}

LeanLayout analyze_lean_layout(std::string_view source)
{
    LeanLayout layout;
    auto lines = text::split_lines(source);
    const int n = static_cast<int>(lines.size());
    auto line_at = [&](int ln) -> const std::string & { return lines[static_cast<std::size_t>(ln - 1)]; };

    static const std::regex decl_re(R"(^\s*(theorem|lemma)\s+([^\s(:{\[]+)(.*)$)");
    int decl_indent = 0;
    for (int ln = 1; ln <= n; ++ln) {
        std::smatch m;
        if (std::regex_match(line_at(ln), m, decl_re)) {
            layout.decl_line = ln;
            layout.theorem_name = m[2];
            decl_indent = text::indentation(line_at(ln));
            break;
        }
    }
    if (!layout.has_declaration())
        return layout;

    // Signature runs until the line that contains `:=`.
    std::string sig;
    int sig_end = layout.decl_line;
    for (int ln = layout.decl_line; ln <= n; ++ln) {
        sig += (ln == layout.decl_line ? std::string() : std::string(" ")) + line_at(ln);
        if (line_at(ln).find(":=") != std::string::npos) {
            sig_end = ln;
            break;
        }
        sig_end = ln;
    }
    {
        std::smatch m;
        std::string first = line_at(layout.decl_line);
        std::regex_match(first, m, decl_re);
        auto after_name = sig.substr(sig.find(layout.theorem_name) + layout.theorem_name.size());
        parse_signature(after_name, layout);
    }
    auto sig_tail = text::trim(line_at(sig_end));
    if (sig_tail.size() >= 2 && sig_tail.substr(sig_tail.size() - 2) == "by")
        layout.by_line = sig_end;

    // Binder scope: a step comment directly above the declaration.
    std::optional<int> binder_step;
    int binder_comment_line = 0;
    for (int ln = layout.decl_line - 1; ln >= 1; --ln) {
        if (is_blank(line_at(ln)))
            continue;
        if (!is_comment(line_at(ln)))
            break;
        if (auto k = parse_step_comment(line_at(ln))) {
            binder_step = k;
            binder_comment_line = ln;
            break;
        }
    }

    if (!layout.tactic_proof()) {
        layout.proof_last_line = sig_end;
        if (binder_step)
            layout.blocks.push_back({1, *binder_step, {binder_comment_line, sig_end}, {}, true});
        return layout;
    }

    int last = layout.by_line;
    bool indent_known = false;
    for (int ln = layout.by_line + 1; ln <= n; ++ln) {
        const auto &l = line_at(ln);
        if (is_blank(l))
            continue;
        int ind = text::indentation(l);
        if (ind <= decl_indent)
            break;
        if (!indent_known) {
            layout.tactic_indent = ind;
            indent_known = true;
        }
        last = ln;
    }
    layout.proof_last_line = last;

    struct OpenBlock {
        StepBlock block;
        int last_content = 0;
    };
    std::optional<OpenBlock> open;
    int next_id = 1;
    auto close_open = [&] {
        if (open) {
            open->block.lines.last = std::max(open->last_content, open->block.lines.first);
            layout.blocks.push_back(open->block);
            open.reset();
        }
    };
    if (binder_step) {
        open = OpenBlock{{next_id++, *binder_step, {binder_comment_line, layout.by_line}, {}, true}, layout.by_line};
    }

    std::set<std::string> seen_haves;
    TacticSpan *current = nullptr;
    for (int ln = layout.by_line + 1; ln <= layout.proof_last_line; ++ln) {
        const auto &l = line_at(ln);
        if (is_blank(l))
            continue;
        int ind = text::indentation(l);
        if (is_comment(l)) {
            if (auto k = parse_step_comment(l); k && ind <= layout.tactic_indent) {
                close_open();
                open = OpenBlock{{next_id++, *k, {ln, ln}, {}, false}, ln};
                current = nullptr;
            }
            continue;
        }
        if (ind <= layout.tactic_indent) {
            TacticSpan t;
            t.index = static_cast<int>(layout.tactics.size());
            t.start = {ln, ind};
            t.lines = {ln, ln};
            t.text = std::string(text::trim(l));
            if (open)
                t.block_id = open->block.id;
            layout.tactics.push_back(std::move(t));
            current = &layout.tactics.back();
            auto names = have_names(current->text);
            if (open) {
                for (auto &nm : names) {
                    if (!seen_haves.insert(nm).second)
                        layout.problems.push_back("duplicate have name '" + nm + "' at line " + std::to_string(ln));
                    open->block.have_names.push_back(nm);
                }
            }
            else if (!names.empty()) {
                layout.unannotated_have_lines.push_back(ln);
            }
        }
        else if (current) {
            current->lines.last = ln;
            current->text += "\n" + l.substr(std::min<std::size_t>(l.size(), static_cast<std::size_t>(layout.tactic_indent)));
        }
        if (open)
            open->last_content = ln;
    }
    close_open();
    return layout;
}

LeanSource make_lean_source(std::string text_in, std::string toolchain)
{
    auto layout = analyze_lean_layout(text_in);
    LeanSource src;
    src.full_text = std::move(text_in);
    src.theorem_name = layout.theorem_name;
    src.step_blocks = layout.blocks;
    src.toolchain = std::move(toolchain);
    return src;
}

std::vector<std::string> lean_names(const LeanLayout &layout)
{
    std::vector<std::string> out;
    for (const auto &b : layout.binders)
        out.push_back(b.name);
    for (const auto &t : layout.tactics)
        for (auto &nm : introduced_names(t.text))
            out.push_back(nm);
    return out;
}

} // namespace explorable

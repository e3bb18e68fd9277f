#include "explorable/leanref/checker.hpp"

#include "explorable/core/text.hpp"
#include "explorable/leanref/expr.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>

namespace explorable::leanref {

namespace {

struct Local {
    std::string name;
    bool is_var = false;
    Ty type = Ty::integer;
    ExprPtr prop;
};

struct State {
    std::vector<Local> ctx;
    ExprPtr goal; // null once every goal is closed
};


struct Pos {
    int line = 0;
    int column = 0;
    int indent = 0; // column that continuation lines are measured from
};

int code_points(std::string_view s)
{
    int n = 0;
    for (char c : s)
        n += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    return n;
}

// Position of text[off] given that text[0] sits at `base`.
Pos locate(std::string_view text, Pos base, std::size_t off)
{
    auto head = text.substr(0, off);
    auto nl = head.rfind('\n');
    if (nl == std::string_view::npos)
        return {base.line, base.column + code_points(head), base.indent};
    int lines = static_cast<int>(std::count(head.begin(), head.end(), '\n'));
    return {base.line + lines, base.indent + code_points(head.substr(nl + 1)), base.indent};
}

struct Failure {
    Pos pos;
    std::string message;
};

struct TacticError {
    explicit TacticError(std::string m, std::optional<Pos> p = std::nullopt) : message(std::move(m)), pos(p) {}
    std::string message;
    std::optional<Pos> pos; // filled in by the innermost tactic that failed
};

enum class Verdict { holds, refuted, unknown };

const std::set<std::string, std::less<>> &keywords()
{
    static const std::set<std::string, std::less<>> k{
        "by", "at", "with", "fun", "λ", "do", "then", "else", "if", "from", "show", "have", "let", "set", "this",
        "calc", "using", "only", "generalizing", "in", "exact", "apply", "refine", "intro", "intros", "rintro",
        "obtain", "rcases", "cases", "induction", "rw", "rwa", "erw", "simp", "simp_all", "dsimp", "norm_num",
        "ring", "ring_nf", "omega", "linarith", "nlinarith", "positivity", "decide", "rfl", "trivial",
        "contradiction", "assumption", "exfalso", "constructor", "left", "right", "use", "exists", "subst",
        "subst_vars", "try", "first", "repeat", "all_goals", "any_goals", "field_simp", "push_neg", "by_contra",
        "by_cases", "split", "unfold", "norm_cast", "push_cast", "gcongr", "specialize", "sorry", "aesop", "tauto",
        "zify", "qify", "interval_cases", "exact_mod_cast", "trace_state", "skip", "done", "clear", "change",
        "congr", "ext", "native_decide", "True", "False", "And", "Or", "Not", "Iff", "Prime", "Odd", "Even",
        "IsSquare", "zero", "succ", "ℤ", "ℕ", "Type", "Prop", "Int", "Nat", "Finset", "_",
    };
    return k;
}

const std::set<std::string, std::less<>> &lemmas()
{
    static const std::set<std::string, std::less<>> l{
        "mul_comm", "mul_assoc", "mul_left_comm", "add_comm", "add_assoc", "add_left_comm", "sub_eq_add_neg",
        "mul_add", "add_mul", "mul_sub", "sub_mul", "pow_two", "sq", "pow_succ", "pow_zero", "pow_one", "two_mul",
        "mul_one", "one_mul", "mul_zero", "zero_mul", "add_zero", "zero_add", "sub_self", "neg_mul", "mul_neg",
        "gt_iff_lt", "ge_iff_le", "lt_irrefl", "le_refl", "le_of_lt", "lt_of_lt_of_le", "lt_of_le_of_lt",
        "mul_pos", "mul_lt_mul_of_pos_right", "mul_lt_mul_of_pos_left", "dvd_refl", "dvd_mul_left",
        "dvd_mul_right", "not_prime_of_dvd", "sq_nonneg", "pow_pos", "abs_nonneg", "le_antisymm",
        "geom_sum_pos", "geom_sum_mul", "Odd.neg_pow", "lt_self_pow₀", "absurd", "Odd.pow", "Finset.sum_range_succ",
        "Finset.mul_sum",
    };
    return l;
}

const std::map<std::string, std::string> &closing_messages()
{
    static const std::map<std::string, std::string> m{
        {"omega", "omega could not prove the goal"},
        {"linarith", "linarith failed to find a contradiction"},
        {"nlinarith", "linarith failed to find a contradiction"},
        {"positivity", "failed to prove positivity"},
        {"ring", "ring failed to prove equality"},
        {"decide", "decide failed to reduce the proposition to true"},
        {"norm_num", "norm_num failed to prove the goal"},
        {"contradiction", "contradiction failed"},
        {"assumption", "assumption failed"},
        {"tauto", "tauto failed to solve some goals"},
    };
    return m;
}

bool is_closing(std::string_view w)
{
    static const std::set<std::string, std::less<>> c{
        "exact", "omega", "linarith", "nlinarith", "positivity", "ring", "ring_nf", "norm_num", "simp", "simp_all",
        "decide", "rfl", "trivial", "contradiction", "assumption", "tauto", "aesop", "field_simp", "apply", "refine",
        "use", "exact_mod_cast", "native_decide", "gcongr",
    };
    return c.count(w) > 0;
}

std::string type_text(const Local &l) { return l.is_var ? ty_name(l.type) : print(l.prop); }

std::string display(const State &s)
{
    if (!s.goal)
        return "no goals";
    std::string out;
    for (std::size_t i = 0; i < s.ctx.size();) {
        auto t = type_text(s.ctx[i]);
        std::string names = s.ctx[i].name;
        std::size_t j = i + 1;
        while (j < s.ctx.size() && type_text(s.ctx[j]) == t)
            names += " " + s.ctx[j++].name;
        out += names + " : " + t + "\n";
        i = j;
    }
    return out + "⊢ " + print(s.goal);
}

std::map<std::string, Ty> var_types(const State &s)
{
    std::map<std::string, Ty> m;
    for (const auto &l : s.ctx)
        if (l.is_var)
            m[l.name] = l.type;
    return m;
}

Local *find_local(State &s, const std::string &name)
{
    for (auto it = s.ctx.rbegin(); it != s.ctx.rend(); ++it)
        if (it->name == name)
            return &*it;
    return nullptr;
}

bool is_var_local(const State &s, const ExprPtr &e)
{
    if (e->kind != Kind::var)
        return false;
    for (const auto &l : s.ctx)
        if (l.is_var && l.name == e->name)
            return true;
    return false;
}

bool reflexive(const ExprPtr &e)
{
    return e->kind == Kind::binop && (e->name == "=" || e->name == "↔") && equal(e->args[0], e->args[1]);
}

// Position of the first top-level occurrence of `needle` outside brackets.
std::size_t find_top(std::string_view s, std::string_view needle, std::size_t from = 0)
{
    int depth = 0;
    for (std::size_t i = from; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[' || c == '{')
            ++depth;
        else if (c == ')' || c == ']' || c == '}')
            --depth;
        else if (s.substr(i, 3) == "⟨")
            ++depth;
        else if (s.substr(i, 3) == "⟩")
            --depth;
        if (depth == 0 && s.substr(i, needle.size()) == needle)
            return i;
    }
    return std::string_view::npos;
}

std::string first_word(std::string_view s)
{
    s = text::trim(s);
    std::size_t i = 0;
    while (i < s.size() && s[i] != ' ' && s[i] != '\n' && s[i] != '[' && s[i] != '(' && s[i] != ';')
        ++i;
    return std::string(s.substr(0, i));
}

std::string after_word(std::string_view s)
{
    s = text::trim(s);
    return text::trim_copy(s.substr(first_word(s).size()));
}

// [begin, end) spans between top-level separators.
std::vector<std::pair<std::size_t, std::size_t>> split_spans(std::string_view s, char sep)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    while (true) {
        auto p = find_top(s, std::string_view(&sep, 1), start);
        out.emplace_back(start, p == std::string_view::npos ? s.size() : p);
        if (p == std::string_view::npos)
            break;
        start = p + 1;
    }
    return out;
}

std::vector<std::string> split_top(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto p = find_top(s, std::string_view(&sep, 1), start);
        out.push_back(text::trim_copy(s.substr(start, p == std::string_view::npos ? s.size() - start : p - start)));
        if (p == std::string_view::npos)
            break;
        start = p + 1;
    }
    return out;
}

std::string strip_comment(const std::string &line)
{
    auto p = line.find("--");
    return p == std::string::npos ? line : line.substr(0, p);
}

struct Ident {
    std::string name;
    std::size_t offset;
};

std::vector<Ident> identifiers(std::string_view s)
{
    std::vector<Ident> out;
    std::size_t i = 0;
    auto ident_char = [](char32_t c) { return c == U'ℤ' || c == U'ℕ' || text::is_identifier_char(c); };
    while (i < s.size()) {
        std::size_t j = i;
        char32_t c = text::next_code_point(s, j);
        if (c >= '0' && c <= '9') {
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.'))
                ++j;
            i = j;
            continue;
        }
        if (!ident_char(c)) {
            i = j;
            continue;
        }
        std::size_t start = i;
        i = j;
        while (i < s.size()) {
            std::size_t k = i;
            char32_t d = text::next_code_point(s, k);
            if (ident_char(d) || (d == '.' && k < s.size() && s[k] != ' ' && s[k] != '.')) {
                i = k;
                continue;
            }
            break;
        }
        out.push_back({std::string(s.substr(start, i - start)), start});
    }
    return out;
}

class Checker {
public:
    Checker(std::string_view source, CheckOptions opts) : opts_(opts)
    {
        for (auto &l : text::split_lines(source))
            lines_.push_back(std::move(l));
    }

    std::vector<Diagnostic> run()
    {
        static const std::regex decl_re(R"(^(\s*)(theorem|lemma|example)(\s.*|$))");
        std::size_t ln = 0;
        while (ln < lines_.size()) {
            std::smatch m;
            std::string code = strip_comment(lines_[ln]);
            if (!std::regex_match(code, m, decl_re)) {
                ++ln;
                continue;
            }
            ln = declaration(ln, static_cast<int>(m[1].length()), m[2]);
        }
        return std::move(diags_);
    }

private:
    void emit(Pos p, std::string severity, std::string message)
    {
        diags_.push_back({p.line, p.column, std::move(severity), std::move(message)});
    }

    // Returns the index of the first line after the declaration.
    std::size_t declaration(std::size_t start, int indent, const std::string &keyword)
    {
        Pos decl_pos{static_cast<int>(start) + 1, indent};
        std::string sig;
        std::size_t end = start;
        std::size_t assign = std::string::npos;
        for (std::size_t k = start; k < lines_.size(); ++k) {
            if (k > start)
                sig += "\n";
            sig += strip_comment(lines_[k]);
            assign = find_top(sig, ":=");
            end = k;
            if (assign != std::string::npos)
                break;
        }
        std::size_t next = end + 1;
        while (next < lines_.size()) {
            const auto &l = lines_[next];
            if (!text::trim(strip_comment(l)).empty() && text::indentation(l) <= indent)
                break;
            ++next;
        }
        if (assign == std::string::npos) {
            emit(decl_pos, "error", "unexpected end of input; expected ':='");
            return next;
        }

        State st;
        sorry_reported_ = false;
        decl_pos_ = decl_pos;
        auto header = std::string_view(sig).substr(0, assign);
        header.remove_prefix(header.find(keyword) + keyword.size());
        try {
            parse_header(std::string(header), keyword == "example", st);
        }
        catch (const TacticError &e) {
            emit(decl_pos, "error", e.message);
            return next;
        }

        std::string proof = text::trim_copy(std::string_view(sig).substr(assign + 2));
        int sig_last = static_cast<int>(end) + 1;
        bool tactic_proof = proof == "by" || text::starts_with(proof, "by ") || text::starts_with(proof, "by\n");
        auto code_last = strip_comment(lines_[end]);
        auto assign_col = code_last.find(":=");
        std::size_t proof_col = code_last.find_first_not_of(' ', assign_col == std::string::npos ? 0 : assign_col + 2);
        Pos proof_pos{sig_last, code_points(std::string_view(code_last).substr(0, proof_col)), 0};
        std::string body = code_last.substr(std::min(proof_col, code_last.size()));
        for (std::size_t k = end + 1; k < next; ++k)
            body += "\n" + strip_comment(lines_[k]);
        if (!tactic_proof)
            body = text::trim_copy(body);
        if (auto failure = check_proof(body, st.goal, st, proof_pos, true))
            emit(failure->pos, "error", failure->message);
        return next;
    }

    void parse_header(const std::string &header, bool anonymous, State &st)
    {
        std::string_view h = text::trim(header);
        if (!anonymous) {
            std::size_t i = 0;
            while (i < h.size() && h[i] != ' ' && h[i] != '(' && h[i] != ':' && h[i] != '{' && h[i] != '[')
                ++i;
            if (i == 0)
                throw TacticError{"expected declaration name"};
            h = text::trim(h.substr(i));
        }
        while (!h.empty()) {
            char open = h[0];
            if (open == '(' || open == '{' || open == '[') {
                char close = open == '(' ? ')' : open == '{' ? '}' : ']';
                int depth = 0;
                std::size_t j = 0;
                for (; j < h.size(); ++j) {
                    if (h[j] == open)
                        ++depth;
                    else if (h[j] == close && --depth == 0)
                        break;
                }
                if (j == h.size())
                    throw TacticError{"unterminated binder"};
                auto inner = h.substr(1, j - 1);
                h = text::trim(h.substr(j + 1));
                if (open == '[')
                    continue;
                auto colon = find_top(inner, ":");
                if (colon == std::string_view::npos)
                    throw TacticError{"binder without a type"};
                auto names = text::normalize_space(inner.substr(0, colon));
                auto type = text::trim_copy(inner.substr(colon + 1));
                for (const auto &name : split_top(names, ' ')) {
                    if (name.empty())
                        continue;
                    if (auto ty = ty_from_name(type)) {
                        st.ctx.push_back({name, true, *ty, nullptr});
                    }
                    else {
                        st.ctx.push_back({name, false, Ty::prop, prop_of(type, st)});
                    }
                }
                continue;
            }
            if (h[0] == ':') {
                st.goal = prop_of(h.substr(1), st);
                return;
            }
            throw TacticError{"unexpected token in declaration header"};
        }
        throw TacticError{"declaration has no statement"};
    }

    ExprPtr prop_of(std::string_view src, const State &st)
    {
        ExprPtr e;
        try {
            e = parse_expr(src);
        }
        catch (const ParseError &err) {
            throw TacticError{std::string("unexpected token; ") + err.what()};
        }
        try {
            Ty t = infer(e, var_types(st));
            if (t != Ty::prop)
                throw TacticError{"type expected, got\n  (" + print(e) + " : " + ty_name(t) + ")"};
        }
        catch (const TypeError &err) {
            throw TacticError{err.what()};
        }
        return e;
    }

    // ---- tactic dispatch ---------------------------------------------------

    void exec(const std::string &raw, State &st, Pos pos, bool recover)
    {
        auto lead = raw.find_first_not_of(" \n");
        if (lead == std::string::npos)
            return;
        pos = locate(raw, pos, lead);
        std::string tac = text::trim_copy(raw);
        std::string w = first_word(tac);
        // `a; b` is a sequence unless the `;` belongs to a nested `by` block.
        std::string seq = tac;
        for (std::size_t p; (p = seq.find("<;>")) != std::string::npos;)
            seq.replace(p, 3, ";  ");
        auto spans = split_spans(seq, ';');
        if (spans.size() > 1) {
            auto ids = identifiers(seq.substr(0, spans[0].second));
            bool nested = std::any_of(ids.begin(), ids.end(), [](const Ident &i) { return i.name == "by"; });
            if (!nested) {
                for (auto [b, e] : spans)
                    exec(seq.substr(b, e - b), st, locate(seq, pos, b), recover);
                return;
            }
        }
        try {
            dispatch(tac, w, st, pos, recover);
        }
        catch (TacticError &e) {
            if (!e.pos)
                e.pos = pos;
            throw;
        }
    }

    void dispatch(const std::string &tac, const std::string &w, State &st, Pos pos, bool recover)
    {
        if (w == "try") {
            std::string rest = tac.substr(3);
            Pos rest_pos = locate(tac, pos, 3);
            auto body = text::trim(rest);
            if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
                rest_pos = locate(rest, rest_pos, rest.find('(') + 1);
                rest = std::string(body.substr(1, body.size() - 2));
            }
            State copy = st;
            auto mark = diags_.size();
            try {
                exec(rest, copy, rest_pos, false);
                st = std::move(copy);
            }
            catch (const TacticError &) {
                diags_.resize(mark);
            }
            return;
        }
        if (w == "trace_state") {
            emit(pos, "info", display(st));
            return;
        }
        if (w == "sorry") {
            need_goal(st);
            report_sorry();
            st.goal = nullptr;
            return;
        }
        if (w == "have")
            return tac_have(tac, st, pos, recover);
        if (w == "obtain")
            return tac_obtain(tac, st, pos, recover);
        if (w == "intro" || w == "intros")
            return tac_intro(after_word(tac), st);
        if (w == "rw" || w == "rewrite")
            return tac_rw(after_word(tac), st);
        if (w == "subst")
            return tac_subst(after_word(tac), st);
        if (w == "subst_vars")
            return tac_subst_vars(st);
        if (w == "norm_num" && tac.find(" at ") != std::string::npos)
            return tac_norm_num_at(tac.substr(tac.find(" at ") + 4), st);
        if (w == "simp" && after_word(tac).rfind("only", 0) == 0)
            return tac_simp_only(after_word(after_word(tac)), st);
        if (is_closing(w))
            return tac_close(w, tac, st);
        throw TacticError{"unknown tactic '" + w + "'"};
    }

    // A failed proof of a `have` is logged and the hypothesis kept, except under `try`.
    void settle_proof(const std::optional<Failure> &failure, bool recover)
    {
        if (!failure)
            return;
        if (!recover)
            throw TacticError{failure->message, failure->pos};
        emit(failure->pos, "error", failure->message);
    }

    void need_goal(const State &st)
    {
        if (!st.goal)
            throw TacticError{"no goals to be proved"};
    }

    void report_sorry()
    {
        if (!sorry_reported_)
            emit(decl_pos_, "warning", "declaration uses 'sorry'");
        sorry_reported_ = true;
    }

    void add_hyp(State &st, Local l)
    {
        for (auto &old : st.ctx)
            if (old.name == l.name)
                old.name += "✝";
        st.ctx.push_back(std::move(l));
    }

    // `name : type := proof`
    void tac_have(const std::string &tac, State &st, Pos pos, bool recover)
    {
        std::string body = after_word(tac);
        std::string_view b = body;
        std::string name = "this";
        if (!text::starts_with(b, ":")) {
            name = first_word(b);
            auto colon = name.find(':');
            if (colon != std::string::npos)
                name = name.substr(0, colon);
            b = text::trim(b.substr(name.size()));
        }
        auto assign = find_top(b, ":=");
        if (!text::starts_with(b, ":") || assign == std::string_view::npos)
            throw TacticError{"the reference checker requires `have name : type := proof`"};
        auto claim = prop_of(b.substr(1, assign - 1), st);
        auto proof = std::string(text::trim(b.substr(assign + 2)));
        settle_proof(check_proof(proof, claim, st, locate(tac, pos, tac.size() - proof.size()), recover), recover);
        add_hyp(st, {name, false, Ty::prop, claim});
    }

    // `⟨v, h⟩ : ∃ v : T, body := proof`
    void tac_obtain(const std::string &tac, State &st, Pos pos, bool recover)
    {
        std::string body = after_word(tac);
        std::string_view b = body;
        if (!text::starts_with(b, "⟨"))
            throw TacticError{"the reference checker requires an anonymous-constructor pattern"};
        auto close = b.find("⟩");
        if (close == std::string_view::npos)
            throw TacticError{"unterminated pattern"};
        auto names = split_top(b.substr(3, close - 3), ',');
        b = text::trim(b.substr(close + 3));
        auto assign = find_top(b, ":=");
        if (names.size() != 2 || !text::starts_with(b, ":") || assign == std::string_view::npos)
            throw TacticError{"the reference checker requires `obtain ⟨v, h⟩ : ∃ v, P := proof`"};
        if (names[1] == "rfl")
            throw TacticError{"the reference checker does not support `rfl` patterns"};
        auto claim = prop_of(b.substr(1, assign - 1), st);
        if (claim->kind != Kind::exists)
            throw TacticError{"obtain: expected an existential, got " + print(claim)};
        std::string proof(text::trim(b.substr(assign + 2)));

        Ty ty = Ty::integer;
        if (!claim->type.empty())
            ty = *ty_from_name(claim->type);
        auto inner = substitute(claim->args[0], claim->name, mk_var(names[0]));
        bool witness = text::normalize_space(proof) == "⟨_, rfl⟩" && inner->kind == Kind::binop && inner->name == "=" &&
                       inner->args[0]->kind == Kind::var && inner->args[0]->name == names[0] &&
                       !mentions(inner->args[1], names[0]);
        if (!witness)
            settle_proof(check_proof(proof, claim, st, locate(tac, pos, tac.size() - proof.size()), recover), recover);
        add_hyp(st, {names[0], true, ty, nullptr});
        add_hyp(st, {names[1], false, Ty::prop, inner});
    }

    void tac_intro(const std::string &args, State &st)
    {
        auto names = split_top(text::normalize_space(args), ' ');
        if (names.empty() || names.front().empty())
            names = {"a✝"};
        for (const auto &n : names) {
            need_goal(st);
            const auto &g = st.goal;
            if (g->kind == Kind::not_) {
                add_hyp(st, {n, false, Ty::prop, g->args[0]});
                st.goal = mk_bool(false);
            }
            else if (g->kind == Kind::binop && g->name == "≠") {
                add_hyp(st, {n, false, Ty::prop, mk_bin("=", g->args[0], g->args[1])});
                st.goal = mk_bool(false);
            }
            else if (g->kind == Kind::binop && g->name == "→") {
                auto rhs = g->args[1];
                add_hyp(st, {n, false, Ty::prop, g->args[0]});
                st.goal = rhs;
            }
            else {
                throw TacticError{"no additional binders or let bindings in the goal to introduce"};
            }
        }
    }

    struct Rule {
        std::string source;
        ExprPtr from;
        ExprPtr to;
        std::string comm; // operator of a commutativity lemma; instantiated at the first match
    };

    static ExprPtr first_binop(const ExprPtr &e, const std::string &op)
    {
        if (e->kind == Kind::binop && e->name == op)
            return e;
        for (const auto &a : e->args)
            if (auto hit = first_binop(a, op))
                return hit;
        return nullptr;
    }

    static Rule instantiate(Rule rule, const ExprPtr &target)
    {
        if (rule.comm.empty())
            return rule;
        if (auto hit = first_binop(target, rule.comm)) {
            rule.from = hit;
            rule.to = mk_bin(rule.comm, hit->args[1], hit->args[0]);
        }
        else {
            throw TacticError("tactic 'rewrite' failed, did not find instance of the pattern ?a " + rule.comm + " ?b");
        }
        return rule;
    }

    Rule equation_rule(const std::string &spec, State &st)
    {
        std::string s = spec;
        bool rev = false;
        if (text::starts_with(s, "←")) {
            rev = true;
            s = text::trim_copy(std::string_view(s).substr(3));
        }
        if (s == "mul_comm" || s == "add_comm")
            return Rule{s, nullptr, nullptr, s == "mul_comm" ? "*" : "+"};
        auto *l = find_local(st, s);
        if (!l) {
            if (lemmas().count(s))
                throw TacticError{"the reference checker only rewrites with local hypotheses, not '" + s + "'"};
            throw TacticError{"unknown identifier '" + s + "'"};
        }
        if (l->is_var || l->prop->kind != Kind::binop || (l->prop->name != "=" && l->prop->name != "↔"))
            throw TacticError{"equality or iff proof expected\n  " + s + " : " + type_text(*l)};
        auto a = l->prop->args[0];
        auto b = l->prop->args[1];
        return rev ? Rule{s, b, a, {}} : Rule{s, a, b, {}};
    }

    std::vector<std::string> rule_list(std::string_view &rest)
    {
        rest = text::trim(rest);
        if (!text::starts_with(rest, "["))
            throw TacticError{"expected '['"};
        auto close = find_top(rest, "]");
        if (close == std::string_view::npos)
            throw TacticError{"expected ']'"};
        auto items = split_top(rest.substr(1, close - 1), ',');
        rest = text::trim(rest.substr(close + 1));
        if (items.size() == 1 && items[0].empty())
            items.clear();
        return items;
    }

    void tac_rw(const std::string &args, State &st)
    {
        std::string_view rest = args;
        auto rules = rule_list(rest);
        std::optional<std::string> at;
        if (text::starts_with(rest, "at "))
            at = text::trim_copy(rest.substr(3));
        ExprPtr *target = nullptr;
        if (at) {
            auto *l = find_local(st, *at);
            if (!l || l->is_var)
                throw TacticError{"unknown hypothesis '" + *at + "'"};
            target = &l->prop;
        }
        else {
            need_goal(st);
            target = &st.goal;
        }
        for (const auto &spec : rules) {
            auto rule = instantiate(equation_rule(spec, st), *target);
            int hits = 0;
            auto next = replace(*target, rule.from, rule.to, hits);
            if (hits == 0)
                throw TacticError{"tactic 'rewrite' failed, did not find instance of the pattern in the target expression\n  " +
                                  print(rule.from) + "\n" + display(st)};
            *target = next;
        }
        if (!at && reflexive(st.goal))
            st.goal = nullptr;
    }

    void subst_at(State &st, std::size_t index)
    {
        auto eq = st.ctx[index].prop;
        std::string var;
        ExprPtr value;
        if (is_var_local(st, eq->args[1]) && !mentions(eq->args[0], eq->args[1]->name)) {
            var = eq->args[1]->name;
            value = eq->args[0];
        }
        else if (is_var_local(st, eq->args[0]) && !mentions(eq->args[1], eq->args[0]->name)) {
            var = eq->args[0]->name;
            value = eq->args[1];
        }
        else {
            throw TacticError{"tactic 'subst' failed, invalid equality proof, it is not of the form (x = t) or (t = x)\n  " +
                              st.ctx[index].name + " : " + print(eq)};
        }
        std::string hyp = st.ctx[index].name;
        std::vector<Local> out;
        for (auto &l : st.ctx) {
            if (l.name == hyp || (l.is_var && l.name == var))
                continue;
            if (!l.is_var)
                l.prop = substitute(l.prop, var, value);
            out.push_back(std::move(l));
        }
        st.ctx = std::move(out);
        if (st.goal)
            st.goal = substitute(st.goal, var, value);
    }

    bool var_equation(const State &st, const Local &l)
    {
        if (l.is_var || l.prop->kind != Kind::binop || l.prop->name != "=")
            return false;
        const auto &a = l.prop->args[0];
        const auto &b = l.prop->args[1];
        return (is_var_local(st, b) && !mentions(a, b->name)) || (is_var_local(st, a) && !mentions(b, a->name));
    }

    void tac_subst(const std::string &args, State &st)
    {
        for (const auto &name : split_top(text::normalize_space(args), ' ')) {
            std::optional<std::size_t> index;
            for (std::size_t i = 0; i < st.ctx.size(); ++i)
                if (st.ctx[i].name == name)
                    index = i;
            if (!index)
                throw TacticError{"unknown identifier '" + name + "'"};
            if (st.ctx[*index].is_var) {
                std::optional<std::size_t> eq;
                for (std::size_t i = 0; i < st.ctx.size() && !eq; ++i)
                    if (var_equation(st, st.ctx[i]) && mentions(st.ctx[i].prop, name))
                        eq = i;
                if (!eq)
                    throw TacticError{"tactic 'subst' failed, did not find equation for eliminating '" + name + "'"};
                index = eq;
            }
            else if (st.ctx[*index].prop->kind != Kind::binop || st.ctx[*index].prop->name != "=") {
                throw TacticError{"tactic 'subst' failed, equality expected\n  " + name + " : " + print(st.ctx[*index].prop)};
            }
            subst_at(st, *index);
        }
    }

    void tac_subst_vars(State &st)
    {
        for (bool again = true; again;) {
            again = false;
            for (std::size_t i = 0; i < st.ctx.size(); ++i) {
                if (var_equation(st, st.ctx[i])) {
                    subst_at(st, i);
                    again = true;
                    break;
                }
            }
        }
    }

    std::vector<std::size_t> locations(const std::string &spec, State &st, bool &goal)
    {
        std::vector<std::size_t> out;
        goal = false;
        auto names = split_top(text::normalize_space(spec), ' ');
        if (names.size() == 1 && names[0] == "*") {
            for (std::size_t i = 0; i < st.ctx.size(); ++i)
                if (!st.ctx[i].is_var)
                    out.push_back(i);
            goal = true;
            return out;
        }
        for (const auto &n : names) {
            if (n == "⊢") {
                goal = true;
                continue;
            }
            std::optional<std::size_t> idx;
            for (std::size_t i = 0; i < st.ctx.size(); ++i)
                if (st.ctx[i].name == n && !st.ctx[i].is_var)
                    idx = i;
            if (!idx)
                throw TacticError{"unknown identifier '" + n + "'"};
            out.push_back(*idx);
        }
        return out;
    }

    // Applies per-hypothesis results: True hypotheses disappear, False ones close the goal.
    void settle(State &st, const std::vector<std::size_t> &idx, const std::vector<ExprPtr> &results, ExprPtr goal)
    {
        bool contradiction = false;
        std::set<std::size_t> drop;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto &r = results[k];
            if (r->kind == Kind::true_)
                drop.insert(idx[k]);
            else if (r->kind == Kind::false_)
                contradiction = true;
            st.ctx[idx[k]].prop = r;
        }
        std::vector<Local> kept;
        for (std::size_t i = 0; i < st.ctx.size(); ++i)
            if (!drop.count(i))
                kept.push_back(std::move(st.ctx[i]));
        st.ctx = std::move(kept);
        if (contradiction)
            st.goal = nullptr;
        else if (goal)
            st.goal = goal->kind == Kind::true_ ? nullptr : goal;
    }

    void tac_norm_num_at(const std::string &spec, State &st)
    {
        bool goal = false;
        auto idx = locations(spec, st, goal);
        auto vars = var_types(st);
        bool progress = false;
        std::vector<ExprPtr> results;
        for (auto i : idx) {
            auto folded = fold_constants(st.ctx[i].prop, vars);
            progress = progress || !equal(folded, st.ctx[i].prop);
            results.push_back(folded);
        }
        ExprPtr new_goal;
        if (goal && st.goal) {
            new_goal = fold_constants(st.goal, vars);
            progress = progress || !equal(new_goal, st.goal);
        }
        if (!progress)
            throw TacticError{"norm_num failed to simplify"};
        settle(st, idx, results, new_goal);
    }

    static ExprPtr orient(const ExprPtr &e, bool gt, bool ge)
    {
        if (e->args.empty())
            return e;
        std::vector<ExprPtr> args;
        for (const auto &a : e->args)
            args.push_back(orient(a, gt, ge));
        if (e->kind == Kind::binop && ((gt && e->name == ">") || (ge && e->name == "≥")))
            return mk_bin(e->name == ">" ? "<" : "≤", args[1], args[0]);
        auto copy = std::make_shared<Expr>(*e);
        copy->args = std::move(args);
        return copy;
    }

    void tac_simp_only(const std::string &args, State &st)
    {
        std::string_view rest = args;
        auto specs = rule_list(rest);
        bool gt = false, ge = false;
        std::vector<Rule> rules;
        for (const auto &s : specs) {
            if (s == "gt_iff_lt")
                gt = true;
            else if (s == "ge_iff_le")
                ge = true;
            else
                rules.push_back(equation_rule(s, st));
        }
        bool goal = !text::starts_with(rest, "at ");
        std::vector<std::size_t> idx;
        if (!goal)
            idx = locations(std::string(rest.substr(3)), st, goal);
        auto vars = var_types(st);
        auto simplify = [&](ExprPtr e, const std::string &self) {
            for (int round = 0; round < 64; ++round) {
                auto before = e;
                for (const auto &r : rules) {
                    if (r.source == self || !r.comm.empty())
                        continue;
                    int hits = 0;
                    e = replace(e, r.from, r.to, hits);
                }
                e = fold_constants(orient(e, gt, ge), vars);
                if (equal(before, e))
                    break;
            }
            return reflexive(e) ? mk_bool(true) : e;
        };
        bool progress = false;
        std::vector<ExprPtr> results;
        for (auto i : idx) {
            auto r = simplify(st.ctx[i].prop, st.ctx[i].name);
            progress = progress || !equal(r, st.ctx[i].prop);
            results.push_back(r);
        }
        ExprPtr new_goal;
        if (goal && st.goal) {
            new_goal = simplify(st.goal, "");
            progress = progress || !equal(new_goal, st.goal);
        }
        if (!progress)
            throw TacticError{"simp made no progress"};
        settle(st, idx, results, new_goal);
    }

    void tac_close(const std::string &w, const std::string &tac, State &st)
    {
        need_goal(st);
        if (auto unknown = unknown_identifier(tac, st))
            throw TacticError{*unknown};
        if (tac.find("sorry") != std::string::npos) {
            report_sorry();
            st.goal = nullptr;
            return;
        }
        const auto &g = st.goal;
        if (w == "trivial" && g->kind == Kind::true_) {
            st.goal = nullptr;
            return;
        }
        if (w == "rfl" && reflexive(g)) {
            st.goal = nullptr;
            return;
        }
        if (w == "exact" || w == "assumption") {
            auto term = after_word(tac);
            for (const auto &l : st.ctx)
                if (!l.is_var && (l.name == term || w == "assumption") && equal(l.prop, g)) {
                    st.goal = nullptr;
                    return;
                }
        }
        std::string witness;
        switch (model_check(st, g, witness)) {
        case Verdict::holds:
            st.goal = nullptr;
            return;
        case Verdict::refuted: {
            auto it = closing_messages().find(w);
            if (it != closing_messages().end())
                throw TacticError{it->second + "\n" + witness + display(st)};
            throw TacticError{"unsolved goals\n" + display(st)};
        }
        case Verdict::unknown:
            throw TacticError{w + " failed: the reference checker cannot decide\n  " + print(g)};
        }
    }

    // ---- proofs of claims --------------------------------------------------

    std::optional<Failure> check_proof(const std::string &proof, const ExprPtr &claim, const State &st, Pos pos,
                                       bool recover)
    {
        const std::string &p = proof;
        if (p.empty())
            return Failure{pos, "expected term"};
        if (p == "by" || text::starts_with(p, "by ") || text::starts_with(p, "by\n"))
            return run_nested(p, claim, st, pos, recover);
        if (auto unknown = unknown_identifier(p, st))
            return Failure{pos, *unknown};
        auto ids = identifiers(p);
        if (std::any_of(ids.begin(), ids.end(), [](const Ident &i) { return i.name == "sorry"; })) {
            report_sorry();
            return std::nullopt;
        }
        if (p == "rfl" && reflexive(claim))
            return std::nullopt;
        std::string witness;
        switch (model_check(st, claim, witness)) {
        case Verdict::holds:
            return std::nullopt;
        case Verdict::unknown:
            return Failure{pos, "the reference checker cannot decide\n  " + print(claim)};
        case Verdict::refuted:
            break;
        }
        return Failure{pos, "type mismatch\n  " + text::normalize_space(p) + "\nhas a type that does not match\n  " +
                                print(claim)};
    }

    // Runs `by ...` against `claim`; the first failing tactic ends the block.
    std::optional<Failure> run_nested(const std::string &p, const ExprPtr &claim, const State &st, Pos pos, bool recover)
    {
        std::vector<std::pair<std::size_t, std::size_t>> tactics;
        auto first_nl = p.find('\n');
        std::size_t line_end = first_nl == std::string::npos ? p.size() : first_nl;
        auto inline_start = p.find_first_not_of(' ', 2);
        if (inline_start != std::string::npos && inline_start < line_end)
            tactics.emplace_back(inline_start, line_end);
        int block = -1;
        for (std::size_t ls = line_end; ls < p.size();) {
            ++ls;
            auto le = p.find('\n', ls);
            if (le == std::string::npos)
                le = p.size();
            auto ind = p.find_first_not_of(' ', ls);
            if (ind < le) {
                int width = static_cast<int>(ind - ls);
                if (block < 0)
                    block = width;
                if (width <= block || tactics.empty())
                    tactics.emplace_back(ind, le);
                else
                    tactics.back().second = le;
            }
            ls = le;
        }
        State inner{st.ctx, claim};
        for (auto [b, e] : tactics) {
            Pos at = locate(p, pos, b);
            try {
                exec(p.substr(b, e - b), inner, at, recover);
            }
            catch (const TacticError &err) {
                return Failure{err.pos.value_or(at), err.message};
            }
        }
        if (inner.goal)
            return Failure{pos, "unsolved goals\n" + display(inner)};
        return std::nullopt;
    }

    std::optional<std::string> unknown_identifier(const std::string &p, const State &st)
    {
        auto ids = identifiers(p);
        std::set<std::string> bound;
        // Names introduced by binders inside the proof text.
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto &w = ids[i].name;
            if (w == "have" || w == "let" || w == "set" || w == "generalize") {
                if (i + 1 < ids.size())
                    bound.insert(ids[i + 1].name);
                continue;
            }
            std::vector<std::string_view> stops;
            if (w == "intro" || w == "intros" || w == "rintro" || w == "rename_i" || w == "with")
                stops = {"\n", ";"};
            else if (w == "fun" || w == "λ")
                stops = {"=>", "↦"};
            else if (w == "obtain")
                stops = {":"};
            else
                continue;
            std::size_t limit = p.size();
            for (auto s : stops)
                limit = std::min(limit, p.find(s, ids[i].offset + w.size()));
            for (std::size_t k = i + 1; k < ids.size() && ids[k].offset < limit; ++k)
                bound.insert(ids[k].name);
        }
        for (std::size_t k = 0; k + 1 < p.size(); ++k) {
            if (p[k] == '|') {
                auto arrow = p.find("=>", k);
                for (const auto &id : ids)
                    if (id.offset > k && id.offset < arrow)
                        bound.insert(id.name);
            }
        }
        std::set<std::string> locals;
        for (const auto &l : st.ctx)
            locals.insert(l.name);
        for (const auto &id : ids) {
            const auto &n = id.name;
            if (locals.count(n) || bound.count(n) || keywords().count(n) || lemmas().count(n))
                continue;
            auto dot = n.find('.');
            if (dot != std::string::npos) {
                auto head = n.substr(0, dot);
                if (locals.count(head) || bound.count(head) || std::isupper(static_cast<unsigned char>(head[0])))
                    continue;
            }
            return "unknown identifier '" + n + "'";
        }
        return std::nullopt;
    }

    Verdict model_check(const State &st, const ExprPtr &claim, std::string &witness)
    {
        Env env;
        std::vector<std::string> vars;
        for (const auto &l : st.ctx)
            if (l.is_var) {
                env.types[l.name] = l.type;
                vars.push_back(l.name);
            }
        std::map<std::string, ExprPtr> defs;
        for (const auto &l : st.ctx) {
            if (l.is_var || l.prop->kind != Kind::binop || l.prop->name != "=")
                continue;
            for (int side = 0; side < 2; ++side) {
                const auto &v = l.prop->args[side];
                const auto &e = l.prop->args[1 - side];
                if (v->kind == Kind::var && env.types.count(v->name) && !defs.count(v->name) && !mentions(e, v->name)) {
                    defs[v->name] = e;
                    break;
                }
            }
        }
        // Order definitions so each only uses enumerated or earlier-defined variables.
        std::vector<std::string> order;
        std::set<std::string> known;
        std::vector<std::string> free;
        for (const auto &v : vars)
            if (!defs.count(v)) {
                free.push_back(v);
                known.insert(v);
            }
        for (bool again = true; again;) {
            again = false;
            for (const auto &v : vars) {
                if (known.count(v))
                    continue;
                std::vector<std::string> fv;
                free_vars(defs[v], fv);
                bool ready = std::all_of(fv.begin(), fv.end(), [&](const std::string &x) { return known.count(x) > 0; });
                if (ready) {
                    order.push_back(v);
                    known.insert(v);
                    again = true;
                }
            }
            if (!again) {
                for (const auto &v : vars)
                    if (!known.count(v)) {
                        free.push_back(v);
                        known.insert(v);
                        again = true;
                        break;
                    }
            }
        }

        std::vector<std::pair<std::int64_t, std::int64_t>> box;
        std::size_t total = 1;
        for (const auto &v : free) {
            bool nat = env.types[v] == Ty::natural;
            box.emplace_back(nat ? 0 : opts_.int_lo, nat ? opts_.nat_hi : opts_.int_hi);
            total *= static_cast<std::size_t>(box.back().second - box.back().first + 1);
            if (total > opts_.max_assignments)
                return Verdict::unknown;
        }

        bool unknown = false;
        std::vector<std::int64_t> cur;
        for (auto &b : box)
            cur.push_back(b.first);
        for (std::size_t n = 0; n < total; ++n) {
            if (n > 0) {
                for (std::size_t k = 0; k < cur.size(); ++k) {
                    if (++cur[k] <= box[k].second)
                        break;
                    cur[k] = box[k].first;
                }
            }
            env.values.clear();
            for (std::size_t k = 0; k < free.size(); ++k)
                env.values[free[k]] = cur[k];
            bool ok = true;
            try {
                for (const auto &v : order) {
                    auto t = env.types[v];
                    std::int64_t value = eval_num(defs[v], env, t);
                    if (t == Ty::natural && value < 0)
                        ok = false;
                    env.values[v] = value;
                }
            }
            catch (const EvalFailure &) {
                ok = false;
            }
            if (!ok)
                continue;
            for (const auto &l : st.ctx) {
                if (l.is_var)
                    continue;
                try {
                    if (!eval_prop(l.prop, env)) {
                        ok = false;
                        break;
                    }
                }
                catch (const EvalFailure &) {
                }
            }
            if (!ok)
                continue;
            try {
                if (!eval_prop(claim, env)) {
                    witness.clear();
                    for (const auto &v : vars)
                        witness += v + " := " + std::to_string(env.values[v]) + "\n";
                    return Verdict::refuted;
                }
            }
            catch (const EvalFailure &) {
                unknown = true;
            }
        }
        return unknown ? Verdict::unknown : Verdict::holds;
    }

    CheckOptions opts_;
    std::vector<std::string> lines_;
    std::vector<Diagnostic> diags_;
    Pos decl_pos_;
    bool sorry_reported_ = false;
};

} // namespace

std::vector<Diagnostic> check_source(std::string_view source, const CheckOptions &options)
{
    return Checker(source, options).run();
}

std::string format_diagnostics(const std::string &file, const std::vector<Diagnostic> &diags)
{
    std::string out;
    for (const auto &d : diags)
        out += file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.severity + ": " + d.message + "\n";
    return out;
}

} // namespace explorable::leanref

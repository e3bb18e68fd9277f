#include "explorable/leanref/expr.hpp"

#include "explorable/core/text.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>

namespace explorable::leanref {

namespace {

// ---- lexer ---------------------------------------------------------------

enum class Tok { ident, number, sym, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    std::size_t offset = 0;
};

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> ascii_aliases{{
    {"<->", "↔"},
    {"->", "→"},
    {"<=", "≤"},
    {">=", "≥"},
    {"!=", "≠"},
    {"<-", "←"},
    {"/\\", "∧"},
    {"\\/", "∨"},
}};

constexpr std::array<std::string_view, 35> symbols{
    ":=", "(", ")", "[", "]", ",", ":", "+", "-", "*", "/", "%", "^", "=", "<", ">", "|",
    "¬", "∧", "∨", "→", "↔", "≠", "≤", "≥", "∣", "∃", "∑", "∈", "⟨", "⟩", "←", "↑", "·", "∀",
};

bool ident_start(char32_t c)
{
    if (c >= '0' && c <= '9')
        return false;
    return c == U'ℤ' || c == U'ℕ' || text::is_identifier_char(c);
}

bool ident_rest(char32_t c) { return c == U'ℤ' || c == U'ℕ' || text::is_identifier_char(c); }

std::vector<Token> lex(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (c >= '0' && c <= '9') {
            while (i < s.size() && s[i] >= '0' && s[i] <= '9')
                ++i;
            out.push_back({Tok::number, std::string(s.substr(start, i - start)), start});
            continue;
        }
        std::size_t j = i;
        char32_t cp = text::next_code_point(s, j);
        if (ident_start(cp)) {
            i = j;
            while (i < s.size()) {
                std::size_t k = i;
                char32_t d = text::next_code_point(s, k);
                if (ident_rest(d)) {
                    i = k;
                    continue;
                }
                if (d == '.' && k < s.size()) {
                    std::size_t m = k;
                    char32_t e = text::next_code_point(s, m);
                    if (ident_start(e) || (e >= '0' && e <= '9')) {
                        i = k;
                        continue;
                    }
                }
                break;
            }
            out.push_back({Tok::ident, std::string(s.substr(start, i - start)), start});
            continue;
        }
        bool matched = false;
        for (auto [from, to] : ascii_aliases) {
            if (s.substr(i, from.size()) == from) {
                out.push_back({Tok::sym, std::string(to), start});
                i += from.size();
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        for (auto sym : symbols) {
            if (s.substr(i, sym.size()) == sym) {
                out.push_back({Tok::sym, std::string(sym), start});
                i += sym.size();
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ParseError(start, "unexpected token '" + std::string(s.substr(start, j - start)) + "'");
    }
    out.push_back({Tok::end, "", s.size()});
    return out;
}

// ---- parser --------------------------------------------------------------

struct OpInfo {
    int prec;
    int assoc; // -1 left, 0 none, 1 right
};

std::optional<OpInfo> binary_op(const std::string &op)
{
    if (op == "↔")
        return OpInfo{20, 0};
    if (op == "→")
        return OpInfo{25, 1};
    if (op == "∨")
        return OpInfo{30, 1};
    if (op == "∧")
        return OpInfo{35, 1};
    if (is_relation(op))
        return OpInfo{50, 0};
    if (op == "+" || op == "-")
        return OpInfo{65, -1};
    if (op == "*" || op == "/" || op == "%")
        return OpInfo{70, -1};
    if (op == "^")
        return OpInfo{75, 1};
    return std::nullopt;
}

constexpr int max_prec = 1024;

class Parser {
public:
    explicit Parser(std::string_view s) : toks_(lex(s)) {}

    ExprPtr parse_all()
    {
        auto e = expr(0);
        if (peek().kind != Tok::end)
            throw ParseError(peek().offset, "unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token &peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }
    bool at_sym(std::string_view s) const { return peek().kind == Tok::sym && peek().text == s; }
    void expect(std::string_view s)
    {
        if (!at_sym(s))
            throw ParseError(peek().offset, "expected '" + std::string(s) + "'");
        ++pos_;
    }

    bool atom_start() const
    {
        const auto &t = peek();
        if (t.kind == Tok::ident || t.kind == Tok::number)
            return true;
        return t.kind == Tok::sym && (t.text == "(" || t.text == "⟨" || t.text == "↑");
    }

    ExprPtr expr(int min_prec)
    {
        auto lhs = prefix();
        while (peek().kind == Tok::sym) {
            auto info = binary_op(peek().text);
            if (!info || info->prec < min_prec)
                break;
            auto op = take().text;
            auto rhs = expr(info->assoc == 1 ? info->prec : info->prec + 1);
            lhs = mk_bin(op, lhs, rhs);
            if (info->assoc == 0 && peek().kind == Tok::sym) {
                auto next = binary_op(peek().text);
                if (next && next->prec == info->prec)
                    throw ParseError(peek().offset, "ambiguous, possible interpretations");
            }
        }
        return lhs;
    }

    ExprPtr prefix()
    {
        const auto &t = peek();
        if (t.kind == Tok::sym) {
            if (t.text == "¬") {
                ++pos_;
                auto e = std::make_shared<Expr>();
                e->kind = Kind::not_;
                e->args.push_back(expr(40));
                return e;
            }
            if (t.text == "-") {
                ++pos_;
                auto e = std::make_shared<Expr>();
                e->kind = Kind::neg;
                e->args.push_back(expr(75));
                return e;
            }
            if (t.text == "↑") {
                ++pos_;
                auto e = std::make_shared<Expr>();
                e->kind = Kind::cast;
                e->args.push_back(atom());
                return e;
            }
            if (t.text == "∃") {
                ++pos_;
                auto e = std::make_shared<Expr>();
                e->kind = Kind::exists;
                if (peek().kind != Tok::ident)
                    throw ParseError(peek().offset, "expected binder name");
                e->name = take().text;
                if (at_sym(":")) {
                    ++pos_;
                    if (peek().kind != Tok::ident)
                        throw ParseError(peek().offset, "expected binder type");
                    e->type = take().text;
                }
                expect(",");
                e->args.push_back(expr(0));
                return e;
            }
            if (t.text == "∑") {
                ++pos_;
                auto e = std::make_shared<Expr>();
                e->kind = Kind::sum;
                if (peek().kind != Tok::ident)
                    throw ParseError(peek().offset, "expected binder name");
                e->name = take().text;
                expect("∈");
                e->args.push_back(expr(51));
                expect(",");
                e->args.push_back(expr(67));
                return e;
            }
        }
        if (t.kind == Tok::ident && !atom_is_keyword(t.text)) {
            auto head = atom();
            if (head->kind != Kind::var)
                return head;
            std::vector<ExprPtr> args;
            while (atom_start() && !(peek().kind == Tok::ident && atom_is_keyword(peek().text)))
                args.push_back(atom());
            if (args.empty())
                return head;
            auto e = std::make_shared<Expr>();
            e->kind = Kind::app;
            e->name = head->name;
            e->args = std::move(args);
            return e;
        }
        return atom();
    }

    static bool atom_is_keyword(const std::string &s) { return s == "at" || s == "with" || s == "fun"; }

    ExprPtr atom()
    {
        auto t = take();
        if (t.kind == Tok::number) {
            char *end = nullptr;
            errno = 0;
            auto v = std::strtoll(t.text.c_str(), &end, 10);
            if (errno == ERANGE)
                throw ParseError(t.offset, "numeral too large");
            return mk_num(v);
        }
        if (t.kind == Tok::ident) {
            if (t.text == "True")
                return mk_bool(true);
            if (t.text == "False")
                return mk_bool(false);
            return mk_var(t.text);
        }
        if (t.kind == Tok::sym && t.text == "(") {
            auto inner = expr(0);
            if (at_sym(":")) {
                ++pos_;
                if (peek().kind != Tok::ident)
                    throw ParseError(peek().offset, "expected type");
                auto e = std::make_shared<Expr>();
                e->kind = Kind::cast;
                e->type = take().text;
                e->args.push_back(inner);
                inner = e;
            }
            expect(")");
            return inner;
        }
        if (t.kind == Tok::sym && t.text == "⟨") {
            auto e = std::make_shared<Expr>();
            e->kind = Kind::anon;
            if (!at_sym("⟩")) {
                e->args.push_back(expr(0));
                while (at_sym(",")) {
                    ++pos_;
                    e->args.push_back(expr(0));
                }
            }
            expect("⟩");
            return e;
        }
        if (t.kind == Tok::sym && t.text == "↑") {
            auto e = std::make_shared<Expr>();
            e->kind = Kind::cast;
            e->args.push_back(atom());
            return e;
        }
        if (t.kind == Tok::end)
            throw ParseError(t.offset, "unexpected end of input");
        throw ParseError(t.offset, "unexpected '" + t.text + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---- printer -------------------------------------------------------------

std::string pr(const ExprPtr &e, int ctx)
{
    auto paren = [&](int p, std::string s) { return ctx > p ? "(" + s + ")" : s; };
    switch (e->kind) {
    case Kind::num:
        return std::to_string(e->value);
    case Kind::var:
        return e->name;
    case Kind::true_:
        return "True";
    case Kind::false_:
        return "False";
    case Kind::app: {
        std::string s = e->name;
        for (const auto &a : e->args)
            s += " " + pr(a, max_prec + 1);
        return paren(max_prec, s);
    }
    case Kind::binop: {
        auto info = *binary_op(e->name);
        int lc = info.assoc == -1 ? info.prec : info.prec + 1;
        int rc = info.assoc == 1 ? info.prec : info.prec + 1;
        return paren(info.prec, pr(e->args[0], lc) + " " + e->name + " " + pr(e->args[1], rc));
    }
    case Kind::neg:
        return paren(75, "-" + pr(e->args[0], 75));
    case Kind::not_:
        return paren(40, "¬" + pr(e->args[0], 40));
    case Kind::exists:
        return paren(0, "∃ " + e->name + ", " + pr(e->args[0], 0));
    case Kind::sum:
        return paren(67, "∑ " + e->name + " ∈ " + pr(e->args[0], 51) + ", " + pr(e->args[1], 67));
    case Kind::anon: {
        std::string s = "⟨";
        for (std::size_t i = 0; i < e->args.size(); ++i)
            s += (i ? ", " : "") + pr(e->args[i], 0);
        return s + "⟩";
    }
    case Kind::cast:
        if (e->args[0]->kind == Kind::num)
            return pr(e->args[0], ctx);
        return paren(max_prec, "↑" + pr(e->args[0], max_prec + 1));
    }
    return {};
}

// ---- types ---------------------------------------------------------------

bool numeric(Ty t) { return t == Ty::integer || t == Ty::natural || t == Ty::numeral; }

Ty join(Ty a, Ty b, const ExprPtr &e)
{
    if (!numeric(a) || !numeric(b))
        throw TypeError("type mismatch in '" + print(e) + "': expected a number, got " + ty_name(numeric(a) ? b : a));
    if (a == Ty::integer || b == Ty::integer)
        return Ty::integer;
    if (a == Ty::natural || b == Ty::natural)
        return Ty::natural;
    return Ty::numeral;
}

Ty concrete(Ty t) { return t == Ty::numeral ? Ty::natural : t; }

void need_numeric(Ty t, const ExprPtr &e)
{
    if (!numeric(t))
        throw TypeError("type mismatch: '" + print(e) + "' has type " + ty_name(t) + " but a number is expected");
}

void need_prop(Ty t, const ExprPtr &e)
{
    if (t != Ty::prop)
        throw TypeError("type mismatch: '" + print(e) + "' has type " + ty_name(t) + " but is expected to have type Prop");
}

// ---- evaluation ----------------------------------------------------------

std::int64_t checked(bool overflow, std::int64_t v)
{
    if (overflow)
        throw EvalFailure("arithmetic overflow");
    return v;
}

std::int64_t add(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        throw EvalFailure("arithmetic overflow");
    return r;
}

std::int64_t sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r))
        throw EvalFailure("arithmetic overflow");
    return r;
}

std::int64_t mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw EvalFailure("arithmetic overflow");
    return r;
}

std::int64_t ipow(std::int64_t base, std::int64_t exp)
{
    if (exp < 0)
        throw EvalFailure("negative exponent");
    if (base == 0)
        return exp == 0 ? 1 : 0;
    if (base == 1)
        return 1;
    if (base == -1)
        return exp % 2 == 0 ? 1 : -1;
    std::int64_t r = 1;
    for (std::int64_t k = 0; k < exp; ++k)
        r = mul(r, base);
    return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    // Euclidean division: remainder always non-negative.
    if (b == 0)
        return 0;
    std::int64_t q = a / b;
    std::int64_t r = a % b;
    if (r < 0)
        q = b > 0 ? q - 1 : q + 1;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b)
{
    if (b == 0)
        return a;
    std::int64_t r = a % b;
    if (r < 0)
        r += b > 0 ? b : -b;
    return r;
}

Ty type_in(const ExprPtr &e, const Env &env)
{
    try {
        return infer(e, env.types);
    }
    catch (const TypeError &err) {
        throw EvalFailure(err.what());
    }
}

bool is_square(std::int64_t v)
{
    if (v < 0)
        return false;
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<long double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, r - 2); c <= r + 2; ++c)
        if (c * c == v)
            return true;
    return false;
}

ExprPtr fold(const ExprPtr &e, const std::map<std::string, Ty> &vars, Ty expected);

ExprPtr rebuild(const ExprPtr &e, std::vector<ExprPtr> args)
{
    auto copy = std::make_shared<Expr>(*e);
    copy->args = std::move(args);
    return copy;
}

bool closed(const ExprPtr &e)
{
    std::vector<std::string> fv;
    free_vars(e, fv);
    return fv.empty();
}

ExprPtr fold(const ExprPtr &e, const std::map<std::string, Ty> &vars, Ty expected)
{
    Env env;
    env.types = vars;
    Ty t = Ty::unknown;
    try {
        t = infer(e, vars);
    }
    catch (const TypeError &) {
        return e;
    }
    if (closed(e) && e->kind != Kind::num && e->kind != Kind::true_ && e->kind != Kind::false_) {
        try {
            if (t == Ty::prop)
                return mk_bool(eval_prop(e, env));
            if (numeric(t)) {
                Ty as = t == Ty::numeral ? concrete(expected == Ty::unknown ? Ty::numeral : expected) : t;
                auto folded = mk_num(eval_num(e, env, as));
                return equal(folded, e) ? e : folded;
            }
        }
        catch (const EvalFailure &) {
        }
    }
    std::vector<ExprPtr> args;
    switch (e->kind) {
    case Kind::binop: {
        Ty child = expected;
        if (is_relation(e->name)) {
            try {
                child = concrete(join(infer(e->args[0], vars), infer(e->args[1], vars), e));
            }
            catch (const TypeError &) {
                child = Ty::unknown;
            }
        }
        else if (is_logic(e->name)) {
            child = Ty::unknown;
        }
        args.push_back(fold(e->args[0], vars, child));
        args.push_back(fold(e->args[1], vars, e->name == "^" ? Ty::natural : child));
        break;
    }
    case Kind::not_:
    case Kind::exists:
    case Kind::app:
        for (const auto &a : e->args)
            args.push_back(fold(a, vars, Ty::unknown));
        break;
    case Kind::neg:
        args.push_back(fold(e->args[0], vars, Ty::integer));
        break;
    default:
        return e;
    }
    return rebuild(e, std::move(args));
}

} // namespace

ExprPtr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

ExprPtr mk_num(std::int64_t v)
{
    auto e = std::make_shared<Expr>();
    if (v < 0) {
        if (v == INT64_MIN)
            throw EvalFailure("arithmetic overflow");
        e->kind = Kind::neg;
        e->args.push_back(mk_num(-v));
        return e;
    }
    e->kind = Kind::num;
    e->value = v;
    return e;
}

ExprPtr mk_var(std::string name)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::var;
    e->name = std::move(name);
    return e;
}

ExprPtr mk_bin(std::string op, ExprPtr lhs, ExprPtr rhs)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::binop;
    e->name = std::move(op);
    e->args = {std::move(lhs), std::move(rhs)};
    return e;
}

ExprPtr mk_not(ExprPtr a)
{
    auto e = std::make_shared<Expr>();
    e->kind = Kind::not_;
    e->args.push_back(std::move(a));
    return e;
}

ExprPtr mk_bool(bool b)
{
    auto e = std::make_shared<Expr>();
    e->kind = b ? Kind::true_ : Kind::false_;
    return e;
}

std::string print(const ExprPtr &e) { return pr(e, 0); }

bool equal(const ExprPtr &a, const ExprPtr &b)
{
    if (a.get() == b.get())
        return true;
    if (a->kind != b->kind || a->name != b->name || a->value != b->value || a->args.size() != b->args.size())
        return false;
    if (a->kind == Kind::exists && a->type != b->type)
        return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i]))
            return false;
    return true;
}

bool is_relation(const std::string &op)
{
    return op == "=" || op == "≠" || op == "<" || op == "≤" || op == ">" || op == "≥" || op == "∣";
}

bool is_arith(const std::string &op)
{
    return op == "+" || op == "-" || op == "*" || op == "/" || op == "%" || op == "^";
}

bool is_logic(const std::string &op) { return op == "∧" || op == "∨" || op == "→" || op == "↔"; }

bool mentions(const ExprPtr &e, const std::string &name)
{
    if (e->kind == Kind::var && e->name == name)
        return true;
    if ((e->kind == Kind::exists || e->kind == Kind::sum) && e->name == name)
        return e->kind == Kind::sum && mentions(e->args[0], name);
    for (const auto &a : e->args)
        if (mentions(a, name))
            return true;
    return false;
}

void free_vars(const ExprPtr &e, std::vector<std::string> &out)
{
    if (e->kind == Kind::var) {
        if (std::find(out.begin(), out.end(), e->name) == out.end())
            out.push_back(e->name);
        return;
    }
    if (e->kind == Kind::exists || e->kind == Kind::sum) {
        std::vector<std::string> inner;
        for (std::size_t i = 0; i < e->args.size(); ++i) {
            bool binds = e->kind == Kind::exists || i == 1;
            std::vector<std::string> part;
            free_vars(e->args[i], part);
            for (auto &v : part)
                if (!(binds && v == e->name) && std::find(out.begin(), out.end(), v) == out.end())
                    out.push_back(v);
        }
        return;
    }
    for (const auto &a : e->args)
        free_vars(a, out);
}

ExprPtr replace(const ExprPtr &e, const ExprPtr &pattern, const ExprPtr &replacement, int &hits)
{
    if (equal(e, pattern)) {
        ++hits;
        return replacement;
    }
    if (e->args.empty())
        return e;
    std::vector<ExprPtr> args;
    bool changed = false;
    for (const auto &a : e->args) {
        args.push_back(replace(a, pattern, replacement, hits));
        changed = changed || args.back() != a;
    }
    return changed ? rebuild(e, std::move(args)) : e;
}

ExprPtr substitute(const ExprPtr &e, const std::string &var, const ExprPtr &value)
{
    if (e->kind == Kind::var)
        return e->name == var ? value : e;
    if ((e->kind == Kind::exists || e->kind == Kind::sum) && e->name == var) {
        if (e->kind == Kind::sum)
            return rebuild(e, {substitute(e->args[0], var, value), e->args[1]});
        return e;
    }
    if (e->args.empty())
        return e;
    std::vector<ExprPtr> args;
    bool changed = false;
    for (const auto &a : e->args) {
        args.push_back(substitute(a, var, value));
        changed = changed || args.back() != a;
    }
    return changed ? rebuild(e, std::move(args)) : e;
}

std::string ty_name(Ty t)
{
    switch (t) {
    case Ty::integer:
        return "ℤ";
    case Ty::natural:
        return "ℕ";
    case Ty::numeral:
        return "ℕ";
    case Ty::prop:
        return "Prop";
    case Ty::set:
        return "Finset ℕ";
    case Ty::unknown:
        return "?";
    }
    return "?";
}

std::optional<Ty> ty_from_name(std::string_view name)
{
    if (name == "ℤ" || name == "Int")
        return Ty::integer;
    if (name == "ℕ" || name == "Nat")
        return Ty::natural;
    if (name == "Prop")
        return Ty::prop;
    return std::nullopt;
}

Ty infer(const ExprPtr &e, const std::map<std::string, Ty> &vars)
{
    switch (e->kind) {
    case Kind::num:
        return Ty::numeral;
    case Kind::true_:
    case Kind::false_:
        return Ty::prop;
    case Kind::var: {
        auto it = vars.find(e->name);
        if (it == vars.end())
            throw TypeError("unknown identifier '" + e->name + "'");
        return it->second;
    }
    case Kind::app: {
        const auto &f = e->name;
        if (f == "Prime" || f == "Nat.Prime" || f == "Odd" || f == "Even" || f == "IsSquare" || f == "Finset.range") {
            if (e->args.size() != 1)
                throw TypeError("function expected: '" + f + "' takes one argument");
            Ty a = infer(e->args[0], vars);
            need_numeric(a, e->args[0]);
            if ((f == "Nat.Prime" || f == "Finset.range") && a == Ty::integer)
                throw TypeError("type mismatch: '" + print(e->args[0]) + "' has type ℤ but is expected to have type ℕ");
            return f == "Finset.range" ? Ty::set : Ty::prop;
        }
        if (vars.count(f))
            throw TypeError("function expected: '" + f + "' is not a function");
        throw TypeError("unknown identifier '" + f + "'");
    }
    case Kind::binop: {
        Ty a = infer(e->args[0], vars);
        Ty b = infer(e->args[1], vars);
        if (is_logic(e->name)) {
            need_prop(a, e->args[0]);
            need_prop(b, e->args[1]);
            return Ty::prop;
        }
        if (e->name == "^") {
            need_numeric(a, e->args[0]);
            need_numeric(b, e->args[1]);
            if (b == Ty::integer)
                throw TypeError("failed to synthesize HPow " + ty_name(a) + " ℤ");
            return a;
        }
        Ty j = join(a, b, e);
        return is_relation(e->name) ? Ty::prop : j;
    }
    case Kind::neg: {
        Ty a = infer(e->args[0], vars);
        need_numeric(a, e->args[0]);
        if (a == Ty::natural)
            throw TypeError("failed to synthesize Neg ℕ");
        return Ty::integer;
    }
    case Kind::not_:
        need_prop(infer(e->args[0], vars), e->args[0]);
        return Ty::prop;
    case Kind::exists: {
        auto inner = vars;
        Ty t = Ty::natural;
        if (!e->type.empty()) {
            auto named = ty_from_name(e->type);
            if (!named)
                throw TypeError("unknown type '" + e->type + "'");
            t = *named;
        }
        inner[e->name] = t;
        need_prop(infer(e->args[0], inner), e->args[0]);
        return Ty::prop;
    }
    case Kind::sum: {
        Ty s = infer(e->args[0], vars);
        if (s != Ty::set)
            throw TypeError("type mismatch: '" + print(e->args[0]) + "' is not a Finset");
        auto inner = vars;
        inner[e->name] = Ty::natural;
        Ty b = infer(e->args[1], inner);
        need_numeric(b, e->args[1]);
        return b == Ty::numeral ? Ty::natural : b;
    }
    case Kind::anon:
        return Ty::unknown;
    case Kind::cast: {
        Ty a = infer(e->args[0], vars);
        need_numeric(a, e->args[0]);
        if (!e->type.empty()) {
            auto named = ty_from_name(e->type);
            if (!named || !numeric(*named))
                throw TypeError("unknown type '" + e->type + "'");
            return *named;
        }
        return Ty::integer;
    }
    }
    return Ty::unknown;
}

std::int64_t eval_num(const ExprPtr &e, const Env &env, Ty as)
{
    as = concrete(as);
    switch (e->kind) {
    case Kind::num:
        return e->value;
    case Kind::var: {
        auto it = env.values.find(e->name);
        if (it == env.values.end())
            throw EvalFailure("unbound variable '" + e->name + "'");
        return it->second;
    }
    case Kind::neg: {
        std::int64_t v = eval_num(e->args[0], env, Ty::integer);
        return checked(v == INT64_MIN, -v);
    }
    case Kind::cast: {
        Ty own = e->type.empty() ? concrete(type_in(e->args[0], env)) : *ty_from_name(e->type);
        return eval_num(e->args[0], env, own);
    }
    case Kind::sum: {
        const auto &set = e->args[0];
        if (set->kind != Kind::app || set->name != "Finset.range")
            throw EvalFailure("unsupported finset");
        std::int64_t n = eval_num(set->args[0], env, Ty::natural);
        if (n > 100000)
            throw EvalFailure("range too large");
        Env inner = env;
        inner.types[e->name] = Ty::natural;
        std::int64_t acc = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            inner.values[e->name] = i;
            std::int64_t v = eval_num(e->args[1], inner, as);
            acc = add(acc, v);
        }
        return acc;
    }
    case Kind::binop: {
        const auto &op = e->name;
        if (op == "^") {
            std::int64_t b = eval_num(e->args[0], env, as);
            std::int64_t x = eval_num(e->args[1], env, Ty::natural);
            return ipow(b, x);
        }
        if (!is_arith(op))
            break;
        std::int64_t a = eval_num(e->args[0], env, as);
        std::int64_t b = eval_num(e->args[1], env, as);
        std::int64_t r = 0;
        if (op == "+")
            return add(a, b);
        if (op == "-") {
            r = sub(a, b);
            return as == Ty::natural && r < 0 ? 0 : r;
        }
        if (op == "*")
            return mul(a, b);
        if (op == "/")
            return floor_div(a, b);
        if (op == "%")
            return floor_mod(a, b);
        break;
    }
    default:
        break;
    }
    throw EvalFailure("cannot evaluate '" + print(e) + "'");
}

bool eval_prop(const ExprPtr &e, const Env &env)
{
    switch (e->kind) {
    case Kind::true_:
        return true;
    case Kind::false_:
        return false;
    case Kind::not_:
        return !eval_prop(e->args[0], env);
    case Kind::binop: {
        const auto &op = e->name;
        if (op == "∧")
            return eval_prop(e->args[0], env) && eval_prop(e->args[1], env);
        if (op == "∨")
            return eval_prop(e->args[0], env) || eval_prop(e->args[1], env);
        if (op == "→")
            return !eval_prop(e->args[0], env) || eval_prop(e->args[1], env);
        if (op == "↔")
            return eval_prop(e->args[0], env) == eval_prop(e->args[1], env);
        if (!is_relation(op))
            break;
        Ty t = concrete(join(type_in(e->args[0], env), type_in(e->args[1], env), e));
        std::int64_t a = eval_num(e->args[0], env, t);
        std::int64_t b = eval_num(e->args[1], env, t);
        if (op == "=")
            return a == b;
        if (op == "≠")
            return a != b;
        if (op == "<")
            return a < b;
        if (op == "≤")
            return a <= b;
        if (op == ">")
            return a > b;
        if (op == "≥")
            return a >= b;
        return a == 0 ? b == 0 : floor_mod(b, a) == 0;
    }
    case Kind::app: {
        if (e->args.size() != 1)
            break;
        Ty t = concrete(type_in(e->args[0], env));
        std::int64_t v = eval_num(e->args[0], env, t);
        const auto &f = e->name;
        if (f == "Prime")
            return is_prime(v < 0 ? -v : v);
        if (f == "Nat.Prime")
            return is_prime(v);
        if (f == "Odd")
            return floor_mod(v, 2) == 1;
        if (f == "Even")
            return floor_mod(v, 2) == 0;
        if (f == "IsSquare")
            return is_square(v);
        break;
    }
    case Kind::exists: {
        const auto &body = e->args[0];
        if (body->kind == Kind::binop && body->name == "=") {
            for (int side = 0; side < 2; ++side) {
                const auto &v = body->args[side];
                const auto &rhs = body->args[1 - side];
                if (v->kind == Kind::var && v->name == e->name && !mentions(rhs, e->name)) {
                    Env inner = env;
                    Ty t = e->type.empty() ? Ty::natural : ty_from_name(e->type).value_or(Ty::natural);
                    inner.types[e->name] = t;
                    std::int64_t value = eval_num(rhs, inner, t);
                    return !(t == Ty::natural && value < 0);
                }
            }
        }
        Env inner = env;
        Ty t = e->type.empty() ? Ty::natural : ty_from_name(e->type).value_or(Ty::natural);
        inner.types[e->name] = t;
        for (std::int64_t k = t == Ty::natural ? 0 : -64; k <= 64; ++k) {
            inner.values[e->name] = k;
            try {
                if (eval_prop(body, inner))
                    return true;
            }
            catch (const EvalFailure &) {
            }
        }
        throw EvalFailure("cannot decide existential '" + print(e) + "'");
    }
    default:
        break;
    }
    throw EvalFailure("cannot evaluate '" + print(e) + "'");
}

ExprPtr fold_constants(const ExprPtr &e, const std::map<std::string, Ty> &vars) { return fold(e, vars, Ty::unknown); }

bool is_prime(std::int64_t v)
{
    if (v < 2)
        return false;
    for (std::int64_t d = 2; d <= v / d; ++d)
        if (v % d == 0)
            return false;
    return true;
}

} // namespace explorable::leanref

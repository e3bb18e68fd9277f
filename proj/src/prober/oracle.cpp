#include "explorable/prober/oracle.hpp"

#include "explorable/core/errors.hpp"

#include <cctype>
#include <vector>

namespace explorable::oracle {

struct Node {
    enum Op { lit, var, call, unary, binary } op = lit;
    std::int64_t value = 0;
    std::string name; // variable, function or operator
    std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        throw OracleError("overflow in " + std::to_string(a) + " + " + std::to_string(b));
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r))
        throw OracleError("overflow in " + std::to_string(a) + " - " + std::to_string(b));
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw OracleError("overflow in " + std::to_string(a) + " * " + std::to_string(b));
    return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    if (b == 0)
        throw OracleError("division by zero");
    if (a == INT64_MIN && b == -1)
        throw OracleError("overflow in division");
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

std::int64_t power(std::int64_t base, std::int64_t exp)
{
    if (exp < 0)
        throw OracleError("negative exponent");
    if (base == 0)
        return exp == 0 ? 1 : 0;
    if (base == 1)
        return 1;
    if (base == -1)
        return exp % 2 == 0 ? 1 : -1;
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < exp; ++i)
        r = checked_mul(r, base);
    return r;
}

class Parser {
public:
    explicit Parser(const std::string &s) : s_(s) {}

    NodePtr parse()
    {
        auto e = disjunction();
        skip();
        if (i_ != s_.size())
            fail("unexpected '" + s_.substr(i_, 1) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string &msg) const
    {
        throw OracleError(msg + " at offset " + std::to_string(i_) + " in `" + s_ + "`");
    }

    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
            ++i_;
    }

    bool eat(const std::string &tok)
    {
        skip();
        if (s_.compare(i_, tok.size(), tok) != 0)
            return false;
        // Keep `<` from swallowing the first half of `<=` and friends.
        if (tok.size() == 1 && i_ + 1 < s_.size() && s_[i_ + 1] == '=' && std::string("<>=!").find(tok[0]) != std::string::npos)
            return false;
        if (tok == "!" && i_ + 1 < s_.size() && s_[i_ + 1] == '=')
            return false;
        i_ += tok.size();
        return true;
    }

    static NodePtr make(Node::Op op, std::string name, std::vector<NodePtr> kids, std::int64_t v = 0)
    {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->name = std::move(name);
        n->kids = std::move(kids);
        n->value = v;
        return n;
    }

    NodePtr disjunction()
    {
        auto l = conjunction();
        while (eat("||"))
            l = make(Node::binary, "||", {l, conjunction()});
        return l;
    }

    NodePtr conjunction()
    {
        auto l = negation();
        while (eat("&&"))
            l = make(Node::binary, "&&", {l, negation()});
        return l;
    }

    NodePtr negation()
    {
        if (eat("!"))
            return make(Node::unary, "!", {negation()});
        return comparison();
    }

    NodePtr comparison()
    {
        auto l = sum();
        for (const char *op : {"==", "!=", "<=", ">=", "<", ">"})
            if (eat(op))
                return make(Node::binary, op, {l, sum()});
        return l;
    }

    NodePtr sum()
    {
        auto l = product();
        for (;;) {
            if (eat("+"))
                l = make(Node::binary, "+", {l, product()});
            else if (eat("-"))
                l = make(Node::binary, "-", {l, product()});
            else
                return l;
        }
    }

    NodePtr product()
    {
        auto l = unary();
        for (;;) {
            if (eat("*"))
                l = make(Node::binary, "*", {l, unary()});
            else if (eat("/"))
                l = make(Node::binary, "/", {l, unary()});
            else if (eat("%"))
                l = make(Node::binary, "%", {l, unary()});
            else
                return l;
        }
    }

    NodePtr unary()
    {
        if (eat("-"))
            return make(Node::unary, "-", {unary()});
        auto base = atom();
        if (eat("^"))
            return make(Node::binary, "^", {base, unary()});
        return base;
    }

    NodePtr atom()
    {
        skip();
        if (i_ >= s_.size())
            fail("unexpected end");
        if (eat("(")) {
            auto e = disjunction();
            if (!eat(")"))
                fail("expected ')'");
            return e;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                v = checked_add(checked_mul(v, 10), s_[i_] - '0');
                ++i_;
            }
            return make(Node::lit, "", {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
                ++i_;
            std::string name = s_.substr(start, i_ - start);
            if (!eat("("))
                return make(Node::var, name, {});
            std::vector<NodePtr> args{disjunction()};
            while (eat(","))
                args.push_back(disjunction());
            if (!eat(")"))
                fail("expected ')' after arguments of " + name);
            static const std::map<std::string, std::size_t> arity{
                {"prime", 1}, {"is_square", 1}, {"abs", 1}, {"divides", 2}, {"min", 2}, {"max", 2}};
            auto it = arity.find(name);
            if (it == arity.end())
                fail("unknown function " + name);
            if (it->second != args.size())
                fail(name + " takes " + std::to_string(it->second) + " argument(s)");
            return make(Node::call, name, std::move(args));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string &s_;
    std::size_t i_ = 0;
};

std::int64_t eval_node(const Node &n, const std::map<std::string, std::int64_t> &vars)
{
    switch (n.op) {
    case Node::lit:
        return n.value;
    case Node::var: {
        auto it = vars.find(n.name);
        if (it == vars.end())
            throw OracleError("unbound variable " + n.name);
        return it->second;
    }
    case Node::unary: {
        auto v = eval_node(*n.kids[0], vars);
        return n.name == "!" ? (v == 0) : checked_sub(0, v);
    }
    case Node::call: {
        auto a = eval_node(*n.kids[0], vars);
        if (n.name == "prime")
            return prime(a);
        if (n.name == "is_square")
            return is_square(a);
        if (n.name == "abs")
            return a < 0 ? checked_sub(0, a) : a;
        auto b = eval_node(*n.kids[1], vars);
        if (n.name == "divides")
            return a == 0 ? b == 0 : b % a == 0;
        if (n.name == "min")
            return std::min(a, b);
        return std::max(a, b);
    }
    case Node::binary:
        break;
    }
    const auto &op = n.name;
    if (op == "&&")
        return eval_node(*n.kids[0], vars) != 0 && eval_node(*n.kids[1], vars) != 0;
    if (op == "||")
        return eval_node(*n.kids[0], vars) != 0 || eval_node(*n.kids[1], vars) != 0;
    auto a = eval_node(*n.kids[0], vars);
    auto b = eval_node(*n.kids[1], vars);
    if (op == "+")
        return checked_add(a, b);
    if (op == "-")
        return checked_sub(a, b);
    if (op == "*")
        return checked_mul(a, b);
    if (op == "/")
        return floor_div(a, b);
    if (op == "%")
        return checked_sub(a, checked_mul(floor_div(a, b), b));
    if (op == "^")
        return power(a, b);
    if (op == "==")
        return a == b;
    if (op == "!=")
        return a != b;
    if (op == "<")
        return a < b;
    if (op == "<=")
        return a <= b;
    if (op == ">")
        return a > b;
    return a >= b;
}

} // namespace

bool prime(std::int64_t v)
{
    if (v < 0)
        v = -v; // integer primes are associates of natural primes
    if (v < 2)
        return false;
    for (std::int64_t d = 2; d <= v / d; ++d)
        if (v % d == 0)
            return false;
    return true;
}

bool is_square(std::int64_t v)
{
    if (v < 0)
        return false;
    std::int64_t lo = 0, hi = 3037000499; // floor(sqrt(INT64_MAX))
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo + 1) / 2;
        if (mid * mid <= v)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo * lo == v;
}

Program Program::compile(const std::string &source)
{
    Program p;
    p.source_ = source;
    p.root_ = Parser(source).parse();
    return p;
}

std::int64_t Program::eval(const std::map<std::string, std::int64_t> &vars) const
{
    return eval_node(*root_, vars);
}

} // namespace explorable::oracle

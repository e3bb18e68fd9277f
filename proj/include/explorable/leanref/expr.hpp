#pragma once

// Terms of the Lean fragment the reference checker understands: integer and
// natural arithmetic, relations, propositional connectives, a handful of
// number-theoretic predicates, bounded sums and existentials.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace explorable::leanref {

enum class Kind {
    num,      // non-negative literal
    var,      // identifier
    app,      // name applied to args
    binop,    // name holds the operator symbol
    neg,      // unary minus
    not_,     // ¬
    exists,   // ∃ name : type, args[0]
    sum,      // ∑ name ∈ args[0], args[1]
    anon,     // ⟨args...⟩
    cast,     // ↑args[0] or (args[0] : type)
    true_,
    false_,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    Kind kind = Kind::num;
    std::string name;
    std::int64_t value = 0;
    std::string type;
    std::vector<ExprPtr> args;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string &what) : std::runtime_error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

ExprPtr parse_expr(std::string_view text);

ExprPtr mk_num(std::int64_t v); // negative values become neg(num)
ExprPtr mk_var(std::string name);
ExprPtr mk_bin(std::string op, ExprPtr lhs, ExprPtr rhs);
ExprPtr mk_not(ExprPtr e);
ExprPtr mk_bool(bool b);

std::string print(const ExprPtr &e);

bool equal(const ExprPtr &a, const ExprPtr &b);
bool is_relation(const std::string &op);
bool is_arith(const std::string &op);
bool is_logic(const std::string &op);

bool mentions(const ExprPtr &e, const std::string &name);
// Free identifiers (vars and heads of applications excluded).
void free_vars(const ExprPtr &e, std::vector<std::string> &out);

// Replaces every occurrence of `pattern` by `replacement`; `hits` counts replacements.
ExprPtr replace(const ExprPtr &e, const ExprPtr &pattern, const ExprPtr &replacement, int &hits);
ExprPtr substitute(const ExprPtr &e, const std::string &var, const ExprPtr &value);

// ---- types ---------------------------------------------------------------

enum class Ty { integer, natural, numeral, prop, set, unknown };

std::string ty_name(Ty t);
std::optional<Ty> ty_from_name(std::string_view name);

struct TypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Variable name -> type. Throws TypeError on ill-typed terms or unknown identifiers.
Ty infer(const ExprPtr &e, const std::map<std::string, Ty> &vars);

// ---- evaluation ----------------------------------------------------------

// Thrown when arithmetic leaves int64 or the term is outside the evaluable fragment.
struct EvalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Env {
    std::map<std::string, std::int64_t> values;
    std::map<std::string, Ty> types;
};

std::int64_t eval_num(const ExprPtr &e, const Env &env, Ty as);
bool eval_prop(const ExprPtr &e, const Env &env);

// Folds closed arithmetic subterms into literals and closed relations into True/False.
ExprPtr fold_constants(const ExprPtr &e, const std::map<std::string, Ty> &vars);

bool is_prime(std::int64_t v);

} // namespace explorable::leanref

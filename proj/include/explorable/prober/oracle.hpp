#pragma once

// Ground-truth predicates over integer inputs, evaluated directly.
//
//   expr  := or
//   or    := and ('||' and)*          and := not ('&&' not)*
//   not   := '!' not | cmp             cmp := sum (('=='|'!='|'<'|'<='|'>'|'>=') sum)?
//   sum   := prod (('+'|'-') prod)*    prod := unary (('*'|'/'|'%') unary)*
//   unary := '-' unary | pow           pow := atom ('^' unary)?
//   atom  := int | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: prime(a), is_square(a), divides(a, b), abs(a), min(a, b), max(a, b).
// `/` and `%` round toward negative infinity. Overflow raises OracleError.

#include <cstdint>
#include <map>
#include <memory>
#include <string>

namespace explorable::oracle {

struct Node;

class Program {
public:
    static Program compile(const std::string &source);
    std::int64_t eval(const std::map<std::string, std::int64_t> &vars) const;
    bool holds(const std::map<std::string, std::int64_t> &vars) const { return eval(vars) != 0; }
    const std::string &source() const { return source_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

bool prime(std::int64_t v);
bool is_square(std::int64_t v);

} // namespace explorable::oracle

#pragma once

// Checks a Lean source file written in the fragment the corpus uses and
// reports diagnostics the way the Lean front end prints them.
//
// Rewriting tactics (rw, subst, norm_num at, simp only) transform the state
// symbolically. Automation (omega, linarith, ring, exact, ...) and nested
// `by` proofs are decided by evaluating the claim on every assignment of the
// free variables within a bounded box that satisfies the hypotheses; values
// fixed by `v = e` hypotheses are computed rather than enumerated, so closed
// instances are decided exactly.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace explorable::leanref {

struct Diagnostic {
    int line = 0;   // 1-based
    int column = 0; // 0-based
    std::string severity; // error | warning | info
    std::string message;
};

struct CheckOptions {
    std::int64_t int_lo = -10;
    std::int64_t int_hi = 10;
    std::int64_t nat_hi = 12;
    std::size_t max_assignments = 250000;
};

std::vector<Diagnostic> check_source(std::string_view source, const CheckOptions &options = {});

// `file:line:col: severity: message`, one block per diagnostic.
std::string format_diagnostics(const std::string &file, const std::vector<Diagnostic> &diags);

} // namespace explorable::leanref

#pragma once

#include "explorable/core/types.hpp"

namespace explorable {

// Checks every type invariant of the document and its parts. Violations carry
// JSON-style field paths ($.lean.step_blocks[2].lines, ...).
ValidationReport validate_document(const ProofDocument &doc);

ValidationReport validate_written(const WrittenProof &w, const std::string &path = "$.written");
ValidationReport validate_lean(const LeanSource &l, const std::string &path = "$.lean");
ValidationReport validate_state(const ProofState &s, const std::string &path);
ValidationReport validate_graph(const FactGraph &g, const WrittenProof &w, const std::string &path = "$.graph");

} // namespace explorable

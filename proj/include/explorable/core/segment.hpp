#pragma once

#include "explorable/core/types.hpp"

#include <optional>
#include <string>

namespace explorable {

// Splits a proof into prose steps. With an explicit `marker`, steps are the
// pieces between markers. Otherwise paragraphs (blank-line separated) become
// steps; a single paragraph is split at sentence boundaries outside `$...$`.
// The partition is exact: WrittenProof::proof_text() reproduces `proof_text`.
WrittenProof segment_written_proof(const std::string &theorem_text, const std::string &proof_text,
                                   const std::optional<std::string> &marker = std::nullopt);

} // namespace explorable

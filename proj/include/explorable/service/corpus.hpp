#pragma once

// A corpus directory holds one subdirectory per document:
//
//   <corpus>/<id>/document.json   theorem, proof, inputs, oracle, propositions
//   <corpus>/<id>/<lean file>     optional imported Lean proof ("lean" field)
//   <corpus>/<id>/<gold file>     optional gold dependency graph ("gold" field)
//   <corpus>/fixtures/            recorded provider responses

#include "explorable/core/types.hpp"
#include "explorable/depgraph/depgraph.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace explorable {

struct CorpusEntry {
    std::string id;
    std::string title;
    WrittenProof written;
    std::optional<std::string> imported_lean;
    std::optional<GoldGraph> gold;
    std::filesystem::path dir;
};

std::vector<std::string> list_corpus(const std::filesystem::path &corpus);

// Throws NotFound for unknown ids, ConfigError for malformed entries.
CorpusEntry load_corpus_entry(const std::filesystem::path &corpus, const std::string &id);

} // namespace explorable

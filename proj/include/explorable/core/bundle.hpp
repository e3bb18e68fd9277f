#pragma once

// Versioned JSON bundle holding one ProofDocument.

#include "explorable/core/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace explorable {

inline constexpr int bundle_schema_version = 1;

struct LoadedBundle {
    ProofDocument doc;
    std::vector<std::string> warnings; // e.g. ignored unknown fields
};

nlohmann::json to_json(const ProofDocument &doc);
LoadedBundle from_json(const nlohmann::json &j);

std::string serialize_bundle(const ProofDocument &doc);
LoadedBundle parse_bundle(const std::string &text);

// Writes atomically (temp file + rename).
void save_bundle(const ProofDocument &doc, const std::filesystem::path &path);
LoadedBundle load_bundle(const std::filesystem::path &path);

// Sub-document encoders shared with the HTTP layer.
nlohmann::json to_json(const WrittenProof &w);
nlohmann::json to_json(const FactGraph &g);
nlohmann::json to_json(const FourMaps &m);
nlohmann::json to_json(const EvalResult &e);
nlohmann::json to_json(const Sweep &s);
nlohmann::json to_json(const ReducedValue &v);
nlohmann::json to_json(const WorkedTemplate &t);
nlohmann::json to_json(const LinkMap &l);
nlohmann::json to_json(const ProofState &s);

void write_file_atomic(const std::filesystem::path &path, const std::string &content);
std::string read_file(const std::filesystem::path &path);

} // namespace explorable

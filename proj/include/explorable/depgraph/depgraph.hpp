#pragma once

#include "explorable/core/types.hpp"
#include "explorable/runner/runner.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace explorable {

struct StateDelta {
    std::vector<std::string> introduced;
    std::vector<std::string> revoked; // names present before and missing after
    bool goal_changed = false;
    std::string tactic_text;
    std::string note;
};

StateDelta diff_states(const ProofState &prev, const ProofState &next, const std::string &tactic_text);

struct ArtifactSets {
    std::set<std::string> bookkeeping{"rfl", "trivial"};
    std::set<std::string> closing{"omega", "contradiction", "exact", "linarith"};
};

// Requires states.size() == tactics.size() + 1. Tactics are the top-level
// tactic sequence of `lean`, in order.
FactGraph build_fact_graph(const std::vector<ProofState> &states, const std::vector<std::string> &tactics,
                           const LinkMap &links, const LeanSource &lean, const ArtifactSets &sets = {});

FourMaps step_maps(const FactGraph &graph);

std::vector<GraphWarning> detect_artifacts(const FactGraph &graph, const ArtifactSets &sets = {});

// Names in a topological order; throws CycleDetected.
std::vector<std::string> topological_order(const FactGraph &graph);

std::string to_dot(const FactGraph &graph, const std::string &name = "facts");

// Steps reachable downstream from the step that introduces `fact` (used_by closure).
std::vector<int> downstream_steps(const FactGraph &graph, const std::string &fact);

// Captures the states around every top-level tactic of `lean` and builds the graph.
FactGraph recover_graph(const LeanSource &lean, const LinkMap &links, LeanRunner &runner,
                        const std::filesystem::path &workdir, const ArtifactSets &sets = {});

// ---- gold graphs ---------------------------------------------------------

struct GoldStep {
    std::set<int> required;
    std::set<int> optional;
};

struct GoldGraph {
    std::map<int, GoldStep> steps;
    static GoldGraph from_json_text(const std::string &text);
};

struct GoldScore {
    int steps = 0;
    int exact = 0;   // recovered == required ∪ optional
    int correct = 0; // required ⊆ recovered ⊆ required ∪ optional
    std::vector<std::string> details;
};

GoldScore score_against_gold(const FourMaps &maps, const GoldGraph &gold);

} // namespace explorable

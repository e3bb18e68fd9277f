#include "support.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/validate.hpp"
#include "explorable/depgraph/depgraph.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace explorable;
using namespace explorable::testing;

namespace {

const std::string kLean = "import Mathlib\n\n-- step 1\n"
                          "theorem t (a : ℤ) (ha : a > 0) : a + a = 2 * a := by\n"
                          "  -- step 2\n"
                          "  have h : a = a := rfl\n"
                          "  have hb : a + 0 = a := by simp\n"
                          "  -- step 3\n"
                          "  have h2 : a + a = 2 * a := by linarith [ha, hb]\n"
                          "  exact h2\n";

ProofState st(std::vector<Hypothesis> hyps, std::string goal)
{
    ProofState s;
    s.hypotheses = std::move(hyps);
    s.goal_text = std::move(goal);
    return s;
}

struct Synthetic {
    LeanSource lean = make_lean_source(kLean);
    LinkMap links;
    std::vector<std::string> tactics;
    std::vector<ProofState> states;

    Synthetic()
    {
        links.block_links = {{1, {1}}, {2, {2}}, {3, {3}}};
        for (const auto &t : analyze_lean_layout(kLean).tactics)
            tactics.push_back(t.text);
        std::vector<Hypothesis> h = {{"a", "ℤ"}, {"ha", "a > 0"}};
        const std::string goal = "a + a = 2 * a";
        states.push_back(st(h, goal));
        h.push_back({"h", "a = a"});
        states.push_back(st(h, goal));
        h.push_back({"hb", "a + 0 = a"});
        states.push_back(st(h, goal));
        h.push_back({"h2", "a + a = 2 * a"});
        states.push_back(st(h, goal));
        states.push_back(st({}, ""));
    }
};

void check_invariants(const FactGraph &g, const WrittenProof &w, const std::string &what)
{
    EXPECT_NO_THROW(topological_order(g)) << what;
    for (const auto &[from, to] : g.edges) {
        const auto &a = g.nodes.at(from);
        const auto &b = g.nodes.at(to);
        EXPECT_LT(a.order, b.order) << what << ": " << from << " -> " << to;
        if (a.prose_step_index && b.prose_step_index)
            EXPECT_LE(*a.prose_step_index, *b.prose_step_index) << what << ": " << from << " -> " << to;
    }
    // used_by is the transpose of relies_on.
    std::set<std::pair<int, int>> forward, backward;
    for (const auto &[k, links] : g.step_maps.relies_on)
        for (const auto &l : links)
            forward.insert({l.step, k});
    for (const auto &[j, users] : g.step_maps.used_by)
        for (int k : users)
            backward.insert({j, k});
    EXPECT_EQ(forward, backward) << what;
    for (const auto &[k, links] : g.step_maps.relies_on)
        for (const auto &l : links)
            EXPECT_LT(l.step, k) << what;
    EXPECT_TRUE(validate_graph(g, w).ok()) << what;
}

} // namespace

TEST(FactGraph, SyntheticStatesGiveExpectedEdges)
{
    Synthetic s;
    auto g = build_fact_graph(s.states, s.tactics, s.links, s.lean);
    ASSERT_EQ(g.nodes.size(), 5u);
    EXPECT_TRUE(g.nodes.at("a").axiom);
    EXPECT_EQ(g.nodes.at("a").prose_step_index, 1);
    EXPECT_EQ(g.nodes.at("h2").prose_step_index, 3);
    EXPECT_TRUE(g.edges.count({"ha", "h2"}));
    EXPECT_TRUE(g.edges.count({"hb", "h2"}));
    EXPECT_TRUE(g.edges.count({"a", "h2"}));
    EXPECT_FALSE(g.edges.count({"h", "h2"}));
    EXPECT_TRUE(g.nodes.at("h").bookkeeping);
    EXPECT_FALSE(g.nodes.at("hb").bookkeeping);

    const auto &m = g.step_maps;
    EXPECT_EQ(m.introduces.at(2), (std::set<std::string>{"h", "hb"}));
    EXPECT_EQ(m.used_by.at(2), std::vector<int>{3});
    EXPECT_TRUE(m.consumes.at(3).count("ha"));
    ASSERT_EQ(m.relies_on.at(3).size(), 2u);
    EXPECT_EQ(m.relies_on.at(3)[0].step, 1);
    EXPECT_EQ(m.relies_on.at(3)[1].step, 2);

    auto kinds = [&](WarningKind k) {
        return std::count_if(g.warnings.begin(), g.warnings.end(), [&](const auto &w) { return w.kind == k; });
    };
    EXPECT_EQ(kinds(WarningKind::bookkeeping_node), 1);
    EXPECT_EQ(kinds(WarningKind::closing_tactic_gap), 0);
    EXPECT_EQ(kinds(WarningKind::hypothesis_revoked), 0);
}

TEST(FactGraph, StateCountMismatchIsAConfigError)
{
    Synthetic s;
    s.states.pop_back();
    EXPECT_THROW(build_fact_graph(s.states, s.tactics, s.links, s.lean), ConfigError);
}

TEST(FactGraph, RevocationMarksNodesInactive)
{
    Synthetic s;
    // `hb` disappears while the goal is still open.
    auto &h = s.states[3].hypotheses;
    h.erase(std::remove_if(h.begin(), h.end(), [](const auto &x) { return x.name == "hb"; }), h.end());
    auto g = build_fact_graph(s.states, s.tactics, s.links, s.lean);
    EXPECT_TRUE(g.nodes.at("hb").inactive);
    ASSERT_EQ(std::count_if(g.warnings.begin(), g.warnings.end(),
                            [](const auto &w) { return w.kind == WarningKind::hypothesis_revoked; }),
              1);
}

TEST(FactGraph, DiffStates)
{
    auto d = diff_states(st({{"a", "ℤ"}, {"h", "a = a"}}, "G"), st({{"a", "ℤ"}, {"k", "a > 0"}}, "G'"), "tac");
    EXPECT_EQ(d.introduced, std::vector<std::string>{"k"});
    EXPECT_EQ(d.revoked, std::vector<std::string>{"h"});
    EXPECT_TRUE(d.goal_changed);
    EXPECT_TRUE(diff_states(st({{"a", "ℤ"}}, "G"), st({}, ""), "exact h").revoked.empty());
}

TEST(FactGraph, TopologicalOrderAndCycles)
{
    Synthetic s;
    auto g = build_fact_graph(s.states, s.tactics, s.links, s.lean);
    auto order = topological_order(g);
    ASSERT_EQ(order.size(), g.nodes.size());
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i)
        pos[order[i]] = i;
    for (const auto &[a, b] : g.edges)
        EXPECT_LT(pos[a], pos[b]);
    g.edges.insert({"h2", "ha"});
    EXPECT_THROW(topological_order(g), CycleDetected);
}

TEST(FactGraph, TopologicalOrderOnRandomDags)
{
    std::mt19937 rng(3);
    for (int round = 0; round < 50; ++round) {
        FactGraph g;
        int n = 2 + static_cast<int>(rng() % 25);
        for (int i = 0; i < n; ++i) {
            FactNode node;
            node.name = "f" + std::to_string(i);
            node.order = i;
            node.axiom = true;
            g.nodes[node.name] = node;
        }
        for (int e = 0; e < n * 2; ++e) {
            int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
            if (a < b)
                g.edges.insert({"f" + std::to_string(a), "f" + std::to_string(b)});
        }
        auto order = topological_order(g);
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i)
            pos[order[i]] = i;
        for (const auto &[a, b] : g.edges)
            ASSERT_LT(pos[a], pos[b]);
    }
}

TEST(FactGraph, DotEscapesLabels)
{
    Synthetic s;
    auto g = build_fact_graph(s.states, s.tactics, s.links, s.lean);
    g.nodes.at("h").type_text = "a = \"a\"\nb";
    auto dot = to_dot(g);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    EXPECT_NE(dot.find("\\\"a\\\""), std::string::npos);
    EXPECT_NE(dot.find("\\n"), std::string::npos);
    EXPECT_NE(dot.find("\"ha\" -> \"h2\""), std::string::npos);
}

TEST(FactGraph, GoldScoring)
{
    auto gold = GoldGraph::from_json_text(R"({"steps": {"2": {"required": [1]}, "3": {"required": [1, 2], "optional": [4]}}})");
    FourMaps m;
    m.relies_on[2] = {{1, {"a"}}};
    m.relies_on[3] = {{1, {"a"}}, {2, {"h"}}, {4, {"z"}}};
    auto s = score_against_gold(m, gold);
    EXPECT_EQ(s.steps, 2);
    EXPECT_EQ(s.correct, 2);
    EXPECT_EQ(s.exact, 2);
    m.relies_on[3] = {{2, {"h"}}};
    s = score_against_gold(m, gold);
    EXPECT_EQ(s.correct, 1);
    EXPECT_THROW(GoldGraph::from_json_text("[1]"), ConfigError);
}

TEST(FactGraph, CorpusGraphsSatisfyInvariants)
{
    ScratchDir dir("graphs");
    LeanRunner runner;
    auto config = fixture_config(dir.path());
    for (const auto &id : list_corpus(config.corpus)) {
        auto doc = build_document(id, runner, config);
        ASSERT_TRUE(doc.graph) << id;
        check_invariants(*doc.graph, doc.written, id);
        EXPECT_EQ(doc.graph->step_maps, step_maps(*doc.graph)) << id;
    }
}

TEST(FactGraph, DownstreamOfN)
{
    ScratchDir dir("downstream");
    LeanRunner runner;
    auto doc = build_document("b11", runner, fixture_config(dir.path()));
    auto down = downstream_steps(*doc.graph, "n");
    EXPECT_EQ(down, (std::vector<int>{4, 7, 8}));
    EXPECT_THROW(downstream_steps(*doc.graph, "nope"), NotFound);
}

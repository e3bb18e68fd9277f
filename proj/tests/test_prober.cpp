#include "support.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/prober/prober.hpp"

#include <gtest/gtest.h>

using namespace explorable;
using namespace explorable::testing;

namespace {

struct Docs {
    ScratchDir dir{"prober"};
    LeanRunner runner;
    PipelineConfig config = fixture_config(dir.path());
    ProbeContext ctx{runner, dir.path()};
};

const ProbeResult &step(const EvalResult &e, int k)
{
    for (const auto &p : e.per_step)
        if (p.step_index == k)
            return p;
    throw std::out_of_range("no probe for step " + std::to_string(k));
}

} // namespace

TEST(Probe, SourceFixesInputsAndWrapsThePrefix)
{
    Docs d;
    auto doc = build_document("b11", d.runner, d.config);
    auto src = make_probe(doc.lean, 5, bind({{"x", 2}}));
    EXPECT_NE(src.find("(x : ℤ) (hbind_x : x = 2)"), std::string::npos);
    EXPECT_NE(src.find("subst hbind_x"), std::string::npos);
    EXPECT_EQ(src.find("hx : x > 2"), std::string::npos);
    // Earlier haves are try-wrapped, the step's own have is bare.
    auto hrs = src.find("have hrs");
    ASSERT_NE(hrs, std::string::npos);
    EXPECT_NE(src.rfind("try", hrs), std::string::npos);
    auto hr = src.find("have hr :");
    ASSERT_NE(hr, std::string::npos);
    auto line_start = src.rfind('\n', hr);
    EXPECT_EQ(src.substr(line_start + 1, hr - line_start - 1).find("try"), std::string::npos);
    EXPECT_THROW(make_probe(doc.lean, 5, Binding{}), UnboundInput);
    EXPECT_THROW(make_probe(doc.lean, 42, bind({{"x", 2}})), ConfigError);
}

TEST(Probe, ValuesAtXEquals2)
{
    Docs d;
    auto doc = build_document("b11", d.runner, d.config);
    auto e = evaluate_at(doc, bind({{"x", 2}}), d.ctx);
    EXPECT_FALSE(e.hypotheses_ok);
    EXPECT_EQ(e.break_step, 5);
    EXPECT_EQ(int_value(step(e, 2), "n"), 3);
    EXPECT_EQ(int_value(step(e, 4), "r"), 1);
    EXPECT_EQ(int_value(step(e, 4), "s"), 3);
    EXPECT_FALSE(step(e, 5).closed);
    EXPECT_EQ(std::get<bool>(step(e, 5).values.at("hr")), false);
    EXPECT_TRUE(step(e, 6).closed);
}

TEST(Probe, ExtractValuesFromStates)
{
    ProbeOutcome o;
    ProofState s;
    s.hypotheses = {{"x", "ℤ"}, {"n", "ℤ"}, {"n_def", "n = 3"}, {"hr", "1 > 1"}, {"hs", "s > 1"}};
    s.goal_text = "True";
    ProofState done;
    o.raw_states = {s, done};
    auto v = extract_values(o, {});
    EXPECT_EQ(std::get<std::int64_t>(v.at("n")), 3);
    EXPECT_EQ(std::get<bool>(v.at("hr")), false);
    EXPECT_TRUE(std::holds_alternative<SymbolicValue>(v.at("hs")));
}

TEST(Probe, BindingChecks)
{
    Docs d;
    auto doc = build_document("a1", d.runner, d.config);
    EXPECT_NO_THROW(check_binding(doc.written, bind({{"x", 2}, {"n", 3}})));
    EXPECT_THROW(check_binding(doc.written, bind({{"x", 2}})), InvalidBinding);
    EXPECT_THROW(check_binding(doc.written, bind({{"x", 2}, {"n", -1}})), InvalidBinding);
    EXPECT_THROW(check_binding(doc.written, bind({{"x", 2}, {"n", 3}, {"z", 1}})), InvalidBinding);
    EXPECT_EQ(default_binding(doc.written), bind({{"n", 3}, {"x", 2}}));
}

TEST(Probe, OracleEvaluation)
{
    Docs d;
    auto doc = build_document("a1", d.runner, d.config);
    EXPECT_EQ(oracle_eval(doc, bind({{"x", 2}, {"n", 3}})), std::make_pair(true, true));
    EXPECT_EQ(oracle_eval(doc, bind({{"x", 2}, {"n", 4}})).first, false);
    auto t2 = build_document("proofnet_t2", d.runner, d.config);
    EXPECT_THROW(oracle_eval(t2, bind({{"x", 0}, {"y", 0}})), MissingOracle);
}

TEST(Probe, A1ValuesMatchClosedForms)
{
    Docs d;
    auto doc = build_document("a1", d.runner, d.config);
    auto e = evaluate_at(doc, bind({{"x", 3}, {"n", 5}}), d.ctx);
    EXPECT_TRUE(e.hypotheses_ok);
    EXPECT_FALSE(e.break_step.has_value());
    EXPECT_EQ(int_value(step(e, 2), "N"), 244);
    EXPECT_EQ(int_value(step(e, 4), "r"), 4);
    EXPECT_EQ(int_value(step(e, 4), "s"), 61);
}

TEST(Sweep, CachesAndCaps)
{
    Docs d;
    auto doc = build_document("b11", d.runner, d.config);
    SweepCache cache;
    auto s = sweep(doc, "x", {1, 4}, cache, d.ctx);
    ASSERT_EQ(s.entries.size(), 4u);
    EXPECT_FALSE(s.entries[1].hypotheses_ok);
    EXPECT_EQ(s.entries[1].break_step, 5);
    EXPECT_TRUE(s.entries[2].hypotheses_ok);
    EXPECT_FALSE(s.entries[2].break_step.has_value());
    EXPECT_EQ(cache.evals.size(), 4u);
    auto before = d.runner.invocations();
    sweep(doc, "x", {2, 4}, cache, d.ctx);
    EXPECT_EQ(d.runner.invocations(), before);
    EXPECT_THROW(sweep(doc, "x", {0, 300}, cache, d.ctx), RangeTooLarge);
    EXPECT_THROW(sweep(doc, "y", {0, 3}, cache, d.ctx), InvalidBinding);
}

TEST(Disagreements, MutatedConstantIsCaught)
{
    Docs d;
    auto doc = build_document("b11", d.runner, d.config);
    auto at = doc.lean.full_text.find("have hr : r > 1");
    ASSERT_NE(at, std::string::npos);
    doc.lean.full_text.replace(at, std::string("have hr : r > 1").size(), "have hr : r > 2");
    auto e = evaluate_at(doc, bind({{"x", 3}}), d.ctx);
    EXPECT_TRUE(e.hypotheses_ok);
    EXPECT_EQ(e.break_step, 5);
    EXPECT_EQ(find_disagreements(doc, e).size(), 1u);
    auto ok = evaluate_at(doc, bind({{"x", 5}}), d.ctx);
    EXPECT_TRUE(find_disagreements(doc, ok).empty());
}

TEST(Probe, DirectoryIsStablePerBinding)
{
    auto a = probe_dir("/w", "b11", bind({{"x", 2}}));
    EXPECT_EQ(a, probe_dir("/w", "b11", bind({{"x", 2}})));
    EXPECT_NE(a, probe_dir("/w", "b11", bind({{"x", 3}})));
    EXPECT_EQ(bind({{"x", 2}, {"n", 3}}).key(), "n=3,x=2");
}

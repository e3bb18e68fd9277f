#include "support.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/segment.hpp"
#include "explorable/core/text.hpp"
#include "explorable/core/validate.hpp"
#include "explorable/runner/runner.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <random>

using namespace explorable;
using namespace explorable::testing;

TEST(Segment, MarkerSplitsExactly)
{
    auto w = segment_written_proof("T", "One. | Two $a.b$. | Three.", std::string(" | "));
    ASSERT_EQ(w.steps.size(), 3u);
    EXPECT_EQ(w.steps[0].text, "One.");
    EXPECT_EQ(w.steps[1].text, "Two $a.b$.");
    EXPECT_EQ(w.steps[2].index, 3);
    EXPECT_EQ(w.proof_text(), "One. | Two $a.b$. | Three.");
}

TEST(Segment, SentencesOutsideMath)
{
    auto w = segment_written_proof("T", "Let $x = 1.5$ hold. Then $y$ follows.");
    ASSERT_EQ(w.steps.size(), 2u);
    EXPECT_NE(w.steps[0].text.find("1.5"), std::string::npos);
}

TEST(Segment, ParagraphsBecomeSteps)
{
    auto w = segment_written_proof("T", "First. Still first.\n\nSecond.");
    ASSERT_EQ(w.steps.size(), 2u);
    EXPECT_EQ(w.steps[1].text, "Second.");
}

TEST(Segment, EmptyProofRejected)
{
    EXPECT_THROW(segment_written_proof("T", "   \n  "), EmptyProof);
}

TEST(Segment, PartitionPropertyOnRandomText)
{
    std::mt19937 rng(7);
    const std::string alphabet = "ab $.\n x=1";
    for (int round = 0; round < 300; ++round) {
        std::string proof = "S";
        int len = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < len; ++i)
            proof += alphabet[rng() % alphabet.size()];
        WrittenProof w;
        try {
            w = segment_written_proof("T", proof);
        } catch (const EmptyProof &) {
            continue;
        }
        EXPECT_EQ(w.proof_text(), proof) << "round " << round;
        for (std::size_t i = 0; i < w.steps.size(); ++i)
            EXPECT_EQ(w.steps[i].index, static_cast<int>(i) + 1);
    }
}

TEST(Text, NormalizeAndIdentifiers)
{
    EXPECT_EQ(text::normalize_space("  a \t b\n c "), "a b c");
    EXPECT_TRUE(text::is_valid_identifier("hr₁"));
    EXPECT_TRUE(text::is_valid_identifier("n_def"));
    EXPECT_FALSE(text::is_valid_identifier("1x"));
    EXPECT_TRUE(text::references_name("rw [n_def, hfactor]", "hfactor"));
    EXPECT_FALSE(text::references_name("rw [n_def]", "n"));
    auto toks = text::local_identifier_tokens("Nat.succ n + hx.le");
    EXPECT_NE(std::find(toks.begin(), toks.end(), "n"), toks.end());
    EXPECT_NE(std::find(toks.begin(), toks.end(), "hx"), toks.end());
}

TEST(LeanLayout, StepBlocksAndHaves)
{
    auto src = make_lean_source(read_file(corpus_dir() / "proofnet_t2" / "proof.lean"));
    ASSERT_EQ(src.step_blocks.size(), 4u);
    EXPECT_TRUE(src.step_blocks[0].binder_block);
    EXPECT_EQ(src.step_blocks[1].have_names, std::vector<std::string>{"hmod"});
    EXPECT_EQ(src.theorem_name, "no_int_sol_three_sq_add_two");
    EXPECT_EQ(have_names("obtain ⟨r, r_def⟩ : ∃ r : ℤ, r = x - 1 := ⟨_, rfl⟩"),
              (std::vector<std::string>{"r", "r_def"}));
    EXPECT_EQ(parse_step_comment("  -- step 12"), 12);
    EXPECT_FALSE(parse_step_comment("  -- steps 1").has_value());
}

TEST(GoalText, ParsesGroupedHypotheses)
{
    auto s = parse_goal_text("x y : ℤ\nh : 3 * x ^ 2 + 2 = y ^ 2\n⊢ False");
    ASSERT_EQ(s.hypotheses.size(), 3u);
    EXPECT_EQ(s.hypotheses[0].name, "x");
    EXPECT_EQ(s.hypotheses[1].type_text, "ℤ");
    EXPECT_EQ(s.hypotheses[2].type_text, "3 * x ^ 2 + 2 = y ^ 2");
    EXPECT_EQ(s.goal_text, "False");
    EXPECT_TRUE(parse_goal_text("no goals").terminal());
}

TEST(GoalText, ContinuationLinesJoinTheType)
{
    auto s = parse_goal_text("h : a = b ∧\n    c = d\n⊢ True");
    ASSERT_EQ(s.hypotheses.size(), 1u);
    EXPECT_NE(s.hypotheses[0].type_text.find("c = d"), std::string::npos);
}

TEST(GoalText, RenderRoundTrip)
{
    ProofState s;
    s.hypotheses = {{"x", "ℤ"}, {"y", "ℤ"}, {"hx", "x > 2"}};
    s.goal_text = "¬Prime (x ^ 2 - 1)";
    auto back = parse_goal_text(render_goal(s));
    EXPECT_EQ(back.hypotheses, s.hypotheses);
    EXPECT_EQ(back.goal_text, s.goal_text);
}

TEST(Diagnostics, ParsesBlocksWithContinuations)
{
    auto d = parse_diagnostics("p.lean:3:4: error: unsolved goals\nx : ℤ\n⊢ False\np.lean:5:0: warning: unused\n");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].line, 3);
    EXPECT_EQ(d[0].column, 4);
    EXPECT_EQ(d[0].severity, "error");
    EXPECT_NE(d[0].message.find("⊢ False"), std::string::npos);
    EXPECT_EQ(d[1].severity, "warning");
}

TEST(Validate, FlagsBrokenWrittenProof)
{
    WrittenProof w;
    w.theorem_text = "for x";
    w.steps = {{1, "a", "", {{"p", 0, 5}}}, {3, "b", "", {}}};
    w.inputs = {{"x", NumberDomain::natural, {-1, 3}, 0}, {"zz", NumberDomain::integer, {0, 1}, 0}};
    auto r = validate_written(w);
    EXPECT_FALSE(r.ok());
    auto has = [&](const std::string &needle) {
        return std::any_of(r.violations.begin(), r.violations.end(),
                           [&](const Finding &f) { return f.message.find(needle) != std::string::npos; });
    };
    EXPECT_TRUE(has("expected index 2"));
    EXPECT_TRUE(has("natural input with negative lower bound"));
    EXPECT_TRUE(has("does not appear in theorem_text"));
}

TEST(Bundle, RoundTripIsIdentity)
{
    ScratchDir dir("bundle");
    LeanRunner runner;
    auto config = fixture_config(dir.path());
    for (const auto &id : list_corpus(config.corpus)) {
        auto doc = build_document(id, runner, config, id == "b11");
        auto text = serialize_bundle(doc);
        auto loaded = parse_bundle(text);
        EXPECT_TRUE(loaded.warnings.empty()) << id;
        EXPECT_EQ(loaded.doc, doc) << id;
        EXPECT_EQ(serialize_bundle(loaded.doc), text) << id;
        save_bundle(doc, config.bundle_path(id));
        EXPECT_EQ(load_bundle(config.bundle_path(id)).doc, doc) << id;
        EXPECT_TRUE(validate_document(doc).ok()) << id;
    }
}

TEST(Bundle, SchemaVersionChecked)
{
    ProofDocument doc;
    doc.id = "d";
    doc.written = segment_written_proof("T", "Only step.");
    auto j = to_json(doc);
    j["schema_version"] = bundle_schema_version + 1;
    EXPECT_THROW(from_json(j), SchemaVersionMismatch);
}

TEST(Bundle, MalformedFieldReportsPath)
{
    ProofDocument doc;
    doc.id = "d";
    doc.written = segment_written_proof("T", "Only step.");
    auto j = to_json(doc);
    j["written"]["steps"][0]["index"] = "one";
    try {
        from_json(j);
        FAIL() << "expected MalformedBundle";
    } catch (const MalformedBundle &e) {
        EXPECT_NE(e.field_path().find("steps"), std::string::npos);
    }
}

TEST(Bundle, UnknownFieldsWarn)
{
    ProofDocument doc;
    doc.id = "d";
    doc.written = segment_written_proof("T", "Only step.");
    auto j = to_json(doc);
    j["extra"] = 1;
    EXPECT_FALSE(from_json(j).warnings.empty());
}

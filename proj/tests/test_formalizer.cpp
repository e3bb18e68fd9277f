#include "support.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/segment.hpp"
#include "explorable/formalizer/formalizer.hpp"
#include "explorable/formalizer/provider.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace explorable;
using namespace explorable::testing;

namespace {

WrittenProof three_steps()
{
    return segment_written_proof("For integers a, a + a = 2a.", "Let a be given. | So 1 = 1. | Hence a + a = 2a.",
                                 std::string(" | "));
}

LeanSource lean(const std::string &body)
{
    return make_lean_source("import Mathlib\n\n-- step 1\ntheorem t (a : ℤ) : a + a = 2 * a := by\n" + body);
}

// Chat-completions endpoint that answers every request with `reply` and keeps the bodies.
class ScriptedEndpoint {
public:
    explicit ScriptedEndpoint(std::string reply) : reply_(std::move(reply))
    {
        server_.Post("/v1/chat/completions", [this](const httplib::Request &req, httplib::Response &res) {
            {
                std::lock_guard lock(mu_);
                bodies_.push_back(nlohmann::json::parse(req.body));
            }
            nlohmann::json r = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply_}}}}}}};
            res.set_content(r.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
    }
    ~ScriptedEndpoint()
    {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    std::vector<nlohmann::json> bodies()
    {
        std::lock_guard lock(mu_);
        return bodies_;
    }

private:
    std::string reply_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::mutex mu_;
    std::vector<nlohmann::json> bodies_;
};

} // namespace

TEST(Alignment, AlignedProofPasses)
{
    auto r = check_alignment(three_steps(), lean("  -- step 2\n  have h : 1 = 1 := rfl\n  -- step 3\n"
                                                 "  have h2 : a + a = 2 * a := by ring\n  exact h2\n"));
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(Alignment, BlockWithoutHaveFails)
{
    auto r = check_alignment(three_steps(), lean("  -- step 2\n  have h : 1 = 1 := rfl\n  -- step 3\n  ring\n"));
    EXPECT_FALSE(r.rule_have_ok);
    EXPECT_TRUE(r.rule_order_ok);
}

TEST(Alignment, StepsOutOfOrderFail)
{
    auto r = check_alignment(three_steps(), lean("  -- step 3\n  have h2 : a + a = 2 * a := by ring\n  -- step 2\n"
                                                 "  have h : 1 = 1 := rfl\n  exact h2\n"));
    EXPECT_FALSE(r.rule_blocks_ok);
}

TEST(Alignment, MissingStepAndOutOfRangeFail)
{
    auto r = check_alignment(three_steps(), lean("  -- step 2\n  have h : 1 = 1 := rfl\n  -- step 4\n"
                                                 "  have h2 : a + a = 2 * a := by ring\n  exact h2\n"));
    EXPECT_FALSE(r.rule_blocks_ok);
    EXPECT_GE(r.blocks_details.size(), 2u);
}

TEST(Alignment, UnannotatedHaveThrows)
{
    auto src = make_lean_source("import Mathlib\n\ntheorem t (a : ℤ) : a + a = 2 * a := by\n"
                                "  have h2 : a + a = 2 * a := by ring\n  exact h2\n");
    EXPECT_THROW(check_alignment(three_steps(), src), UnannotatedBlock);
}

TEST(Alignment, LowNameOverlapIsAdvisoryOnly)
{
    auto w = segment_written_proof("T", "Let q be given. | So w = w. | Hence z.", std::string(" | "));
    w.steps[1].propositions.push_back({"w", 3, 4});
    w.steps[2].propositions.push_back({"z", 6, 7});
    auto r = check_alignment(w, lean("  -- step 2\n  have h : 1 = 1 := rfl\n  -- step 3\n"
                                     "  have h2 : a + a = 2 * a := by ring\n  exact h2\n"));
    EXPECT_TRUE(r.ok());
    EXPECT_LT(r.name_overlap, name_overlap_advisory_threshold);
    EXPECT_FALSE(r.advisories.empty());
}

TEST(Formalizer, ExtractLeanCode)
{
    EXPECT_EQ(extract_lean_code("text\n```lean\nA\nB\n```\nmore"), "A\nB\n");
    EXPECT_EQ(extract_lean_code("theorem x : True := trivial"), "theorem x : True := trivial");
}

TEST(Formalizer, FixtureRunRetriesUntilAligned)
{
    ScratchDir dir("formalize");
    LeanRunner runner;
    auto entry = load_corpus_entry(corpus_dir(), "b11");
    GenerationProvider provider(ProviderConfig::from_env(ProviderMode::fixture, corpus_dir() / "fixtures"));
    auto result = generate_aligned_proof(entry.written, provider, 3, runner, dir.path(), "b11");
    EXPECT_EQ(result.attempts, 2);
    EXPECT_TRUE(result.alignment.ok());
    EXPECT_TRUE(result.compile.success);
    EXPECT_EQ(result.source.step_blocks.size(), 8u);
}

TEST(Formalizer, FixtureMissIsAConfigError)
{
    ScratchDir dir("miss");
    LeanRunner runner;
    auto entry = load_corpus_entry(corpus_dir(), "b11");
    GenerationProvider provider(ProviderConfig::from_env(ProviderMode::fixture, dir.path()));
    EXPECT_THROW(generate_aligned_proof(entry.written, provider, 3, runner, dir.path(), "b11"), FixtureMiss);
}

TEST(Formalizer, ExhaustionCarriesTheLastReports)
{
    ScratchDir dir("exhaust");
    auto misaligned = read_file(corpus_dir() / "b11" / "authored" / "formalize-attempt1.txt");
    ScriptedEndpoint endpoint(misaligned);
    ProviderConfig pc;
    pc.mode = ProviderMode::live;
    pc.base_url = endpoint.url();
    pc.fixture_dir = dir.path() / "recorded";
    GenerationProvider provider(pc);
    LeanRunner runner;
    auto entry = load_corpus_entry(corpus_dir(), "b11");
    try {
        generate_aligned_proof(entry.written, provider, 3, runner, dir.path(), "b11");
        FAIL() << "expected ProofGenerationExhausted";
    } catch (const ProofGenerationExhausted &e) {
        EXPECT_EQ(e.attempts(), 3);
        EXPECT_FALSE(e.alignment().ok());
        EXPECT_TRUE(e.compile().success);
    }
    auto bodies = endpoint.bodies();
    ASSERT_EQ(bodies.size(), 3u);
    EXPECT_EQ(bodies[0]["purpose"], "formalize");
    // Retries carry the previous answer and the alignment feedback.
    EXPECT_GT(bodies[2]["messages"].size(), bodies[0]["messages"].size());
    EXPECT_NE(bodies[1]["messages"].back()["content"].get<std::string>().find("step 6"), std::string::npos);
    // Live responses were recorded under their request hashes.
    std::size_t recorded = 0;
    for (const auto &e : std::filesystem::directory_iterator(pc.fixture_dir))
        recorded += e.path().extension() == ".txt";
    EXPECT_EQ(recorded, 3u);
}

TEST(Provider, RequestHashIsStableAndContentSensitive)
{
    CompletionRequest a;
    a.purpose = "link";
    a.metadata = {{"doc", "b11"}};
    a.messages = {{"user", "hello"}};
    auto b = a;
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 64u);
    b.messages[0].content = "hello!";
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Provider, UnreachableEndpoint)
{
    ProviderConfig pc;
    pc.mode = ProviderMode::live;
    pc.base_url = "http://127.0.0.1:1/v1";
    pc.timeout_seconds = 2;
    GenerationProvider provider(pc);
    CompletionRequest r;
    r.purpose = "link";
    EXPECT_THROW(provider.complete(r), ProviderHTTPError);
}

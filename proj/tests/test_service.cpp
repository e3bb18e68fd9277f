#include "support.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/service/server.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <future>
#include <thread>

namespace fs = std::filesystem;
using namespace explorable;
using namespace explorable::testing;
using Query = std::multimap<std::string, std::string>;

namespace {

struct Served {
    ScratchDir dir{"service"};
    LeanRunner runner;
    PipelineConfig config = fixture_config(dir.path());
    std::map<std::string, ProofDocument> docs;

    explicit Served(bool sweeps = false)
    {
        for (const auto &id : {"b11", "b12", "a1", "proofnet_t2"})
            docs[id] = build_document(id, runner, config, sweeps && std::string(id) == "b11");
    }
};

} // namespace

TEST(Service, DocumentsAndBundleView)
{
    Served s;
    Service svc(s.docs, s.runner, s.dir.path());
    auto list = svc.handle("/documents", {});
    EXPECT_EQ(list.status, 200);
    EXPECT_EQ(list.body["documents"].size(), 4u);
    auto one = svc.handle("/documents/b11", {});
    EXPECT_EQ(one.status, 200);
    EXPECT_EQ(parse_bundle(one.body.dump()).doc, s.docs["b11"]);
}

TEST(Service, ErrorStatuses)
{
    Served s;
    Service svc(s.docs, s.runner, s.dir.path());
    EXPECT_EQ(svc.handle("/nope", {}).status, 404);
    EXPECT_EQ(svc.handle("/documents/zz", {}).status, 404);
    EXPECT_EQ(svc.handle("/documents/b11/eval", {{"x", "abc"}}).status, 422);
    EXPECT_EQ(svc.handle("/documents/b11/eval", {{"y", "1"}}).status, 422);
    EXPECT_EQ(svc.handle("/documents/b11/eval", {{"x", "99999999999999999999"}}).status, 422);
    EXPECT_EQ(svc.handle("/documents/b11/sweep", {{"lo", "-500"}, {"hi", "500"}}).status, 422);
    EXPECT_EQ(svc.handle("/documents/b11/deps", {{"fact", "nothing"}}).status, 404);
    EXPECT_EQ(svc.handle("/documents/proofnet_t2/eval", {{"x", "1"}, {"y", "1"}}).status, 422);
}

TEST(Service, EvalRendersWorkedExampleAndBreak)
{
    Served s;
    Service svc(s.docs, s.runner, s.dir.path());
    auto r = svc.handle("/documents/b11/eval", {{"x", "2"}});
    ASSERT_EQ(r.status, 200);
    EXPECT_FALSE(r.body["hypotheses_ok"].get<bool>());
    EXPECT_EQ(r.body["break_step"], 5);
    EXPECT_EQ(r.body["steps"][1]["text"], "x^2 - 1 = 2^2 - 1 = 3");
    for (const auto &step : r.body["steps"]) {
        EXPECT_FALSE(step.contains("error")) << step.dump();
        EXPECT_EQ(step["breaks"].get<bool>(), step["index"] == 5);
    }
    EXPECT_FALSE(r.body["cached"].get<bool>());
}

TEST(Service, SecondEvalIsServedFromCache)
{
    Served s;
    Service svc(s.docs, s.runner, s.dir.path());
    svc.handle("/documents/b11/eval", {{"x", "7"}});
    auto runs = s.runner.invocations();
    auto again = svc.handle("/documents/b11/eval", {{"x", "7"}});
    EXPECT_TRUE(again.body["cached"].get<bool>());
    EXPECT_EQ(s.runner.invocations(), runs);
}

TEST(Service, PrecomputedBindingsNeedNoToolchain)
{
    Served s(true);
    Service svc(s.docs, s.runner, s.dir.path());
    auto runs = s.runner.invocations();
    for (int x = -10; x <= 10; ++x) {
        auto r = svc.handle("/documents/b11/eval", {{"x", std::to_string(x)}});
        EXPECT_TRUE(r.body["cached"].get<bool>()) << x;
    }
    auto sw = svc.handle("/documents/b11/sweep", {{"var", "x"}});
    ASSERT_EQ(sw.status, 200);
    EXPECT_EQ(s.runner.invocations(), runs);
    for (const auto &e : sw.body["entries"]) {
        auto v = e["value"].get<int>();
        EXPECT_EQ(e["hypotheses_ok"].get<bool>(), v >= 3) << v;
        EXPECT_EQ(e["break_step"].is_null(), v >= 3) << v;
    }
}

TEST(Service, ConcurrentRequestsShareOneEvaluation)
{
    Served s;
    Service svc(s.docs, s.runner, s.dir.path());
    auto before = s.runner.invocations();
    std::vector<std::future<HttpReply>> replies;
    for (int i = 0; i < 6; ++i)
        replies.push_back(std::async(std::launch::async, [&] { return svc.handle("/documents/b11/eval", {{"x", "4"}}); }));
    for (auto &r : replies)
        EXPECT_EQ(r.get().status, 200);
    // One probe per step, regardless of the number of requests.
    EXPECT_EQ(s.runner.invocations() - before, s.docs["b11"].written.steps.size());
}

TEST(Service, DeadlineGivesOracleOnlyReply)
{
    Served s;
    ServerConfig c;
    c.eval_deadline = std::chrono::milliseconds(0);
    Service svc(s.docs, s.runner, s.dir.path(), c);
    auto r = svc.handle("/documents/b11/eval", {{"x", "9"}});
    ASSERT_EQ(r.status, 200);
    if (r.body["probes_pending"].get<bool>()) {
        EXPECT_TRUE(r.body["hypotheses_ok"].get<bool>());
        EXPECT_TRUE(r.body["per_step"].empty());
    }
}

TEST(Service, CapOnUncachedEvaluations)
{
    Served s;
    ServerConfig c;
    c.max_uncached_evals = 0;
    Service svc(s.docs, s.runner, s.dir.path(), c);
    EXPECT_EQ(svc.handle("/documents/b11/eval", {{"x", "3"}}).status, 503);
}

TEST(Service, DepsFollowUsedBy)
{
    Served s;
    Service svc(s.docs, s.runner, s.dir.path());
    auto r = svc.handle("/documents/b11/deps", {{"fact", "n"}});
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["step"], 2);
    const auto &used = s.docs["b11"].graph->step_maps.used_by.at(2);
    EXPECT_EQ(r.body["used_by"].get<std::vector<int>>(), used);
}

TEST(Service, ServesOverHttp)
{
    Served s;
    ServerConfig c;
    c.port = 0;
    Service svc(s.docs, s.runner, s.dir.path(), c);
    std::thread t([&] { svc.listen(); });
    for (int i = 0; i < 200 && svc.bound_port() == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    ASSERT_NE(svc.bound_port(), 0);
    httplib::Client client("127.0.0.1", svc.bound_port());
    auto res = client.Get("/documents/b11/eval?x=2");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    auto body = nlohmann::json::parse(res->body);
    EXPECT_EQ(body["steps"][1]["text"], "x^2 - 1 = 2^2 - 1 = 3");
    auto missing = client.Get("/documents/nope");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    svc.stop();
    t.join();
}

TEST(Corpus, LoaderReportsProblems)
{
    ScratchDir dir("corpus");
    EXPECT_THROW(load_corpus_entry(corpus_dir(), "missing"), NotFound);
    EXPECT_THROW(list_corpus(dir.path() / "absent"), NotFound);
    fs::create_directories(dir.path() / "bad");
    std::ofstream(dir.path() / "bad" / "document.json") << R"({"theorem": "for x", "proof": "One.",
        "propositions": [{"step": 1, "name": "p", "text": "absent"}]})";
    EXPECT_THROW(load_corpus_entry(dir.path(), "bad"), ConfigError);
    std::ofstream(dir.path() / "bad" / "document.json") << "not json";
    EXPECT_THROW(load_corpus_entry(dir.path(), "bad"), ConfigError);
}

TEST(Pipeline, RangeArguments)
{
    EXPECT_EQ(parse_range_arg("-3..4").second, (IntRange{-3, 4}));
    EXPECT_EQ(parse_range_arg("n=3..7").first, "n");
    EXPECT_THROW(parse_range_arg("3-4"), ConfigError);
    EXPECT_THROW(parse_range_arg("x=1..99999999999999999999"), ConfigError);
}

TEST(Pipeline, OracleCheckGrid)
{
    Served s;
    auto r = oracle_check(s.docs["a1"], {{"x", {2, 6}}, {"n", {3, 7}}}, s.runner, s.dir.path());
    EXPECT_EQ(r.bindings, 25u);
    EXPECT_EQ(r.accepted, 15u);
    EXPECT_TRUE(r.disagreements.empty());
}

TEST(Cli, ExitCodes)
{
    ScratchDir dir("cli");
    auto corpus = corpus_dir().string();
    auto work = dir.path().string();
    std::string out;
    EXPECT_EQ(run_cli("formalize --corpus " + corpus + " --workdir " + work, &out), 0) << out;
    EXPECT_EQ(run_cli("analyze --corpus " + corpus + " --workdir " + work, &out), 0) << out;
    EXPECT_NE(out.find("gold: 8/8"), std::string::npos) << out;
    EXPECT_EQ(run_cli("precompute --corpus " + corpus + " --workdir " + work + " --doc b11 --range -3..3", &out), 0)
        << out;
    EXPECT_EQ(run_cli("oracle-check --corpus " + corpus + " --workdir " + work + " --doc b11", &out), 0) << out;
    EXPECT_NE(out.find("0 disagreements"), std::string::npos) << out;

    EXPECT_EQ(run_cli("precompute --corpus " + corpus + " --workdir " + work + " --doc b11 --range -3..3", &out), 0) << out;
    EXPECT_NE(out.find("0 toolchain runs"), std::string::npos) << out;
    EXPECT_EQ(run_cli("precompute --corpus " + corpus + " --workdir " + work + " --doc proofnet_t2", &out), 4) << out;
    EXPECT_EQ(run_cli("oracle-check --corpus " + corpus + " --workdir " + work + " --doc b11 --range 3..2", &out), 0)
        << out;
    EXPECT_NE(out.find("0 bindings"), std::string::npos) << out;

    // Formalizing again in fixture mode rewrites the same bytes.
    auto fresh = dir.path() / "again";
    EXPECT_EQ(run_cli("formalize --corpus " + corpus + " --workdir " + fresh.string() + " --doc b12", &out), 0) << out;
    auto first = read_file(fresh / "bundles" / "b12.json");
    EXPECT_EQ(run_cli("formalize --corpus " + corpus + " --workdir " + fresh.string() + " --doc b12", &out), 0) << out;
    EXPECT_EQ(read_file(fresh / "bundles" / "b12.json"), first);

    EXPECT_EQ(run_cli("analyze --corpus " + corpus + " --workdir " + work + " --doc nope", &out), 2) << out;
    EXPECT_EQ(run_cli("formalize --corpus " + corpus + " --workdir " + work + " --fixtures " + work + "/empty", &out),
              4)
        << out;
    EXPECT_EQ(run_cli("oracle-check --corpus " + corpus + " --workdir " + work + " --doc a1 --range 1..3", &out), 4)
        << out;

    // A bundle whose Lean proof claims too much yields findings (exit 1).
    auto bundle = dir.path() / "bundles" / "b11.json";
    auto j = nlohmann::json::parse(read_file(bundle));
    auto lean = j["lean"]["full_text"].get<std::string>();
    auto at = lean.find("have hr : r > 1");
    ASSERT_NE(at, std::string::npos);
    lean.replace(at, std::string("have hr : r > 1").size(), "have hr : r > 2");
    j["lean"]["full_text"] = lean;
    write_file_atomic(bundle, j.dump(2));
    EXPECT_EQ(run_cli("oracle-check --corpus " + corpus + " --workdir " + work + " --doc b11", &out), 1) << out;

    write_file_atomic(bundle, "{}");
    EXPECT_EQ(run_cli("oracle-check --corpus " + corpus + " --workdir " + work + " --doc b11", &out), 4) << out;
}

TEST(Cli, MissingToolchainExitCode)
{
    ScratchDir dir("cli-tool");
    std::string out;
    auto cmd = "formalize --corpus " + corpus_dir().string() + " --workdir " + dir.path().string() + " --doc b11";
    EXPECT_EQ(run_cli(cmd, &out), 0) << out;
    ::setenv("EXPLORABLE_LEAN", "/nonexistent/lean", 1);
    EXPECT_EQ(run_cli(cmd, &out), 3) << out;
    ::unsetenv("EXPLORABLE_LEAN");
}

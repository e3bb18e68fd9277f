#include "support.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/linker/linker.hpp"

#include <gtest/gtest.h>

using namespace explorable;
using namespace explorable::testing;

namespace {

struct Fixture {
    ScratchDir dir{"linker"};
    LeanRunner runner;
    ProofDocument doc = build_document("b11", runner, fixture_config(dir.path()));
};

bool mentions(const std::vector<Finding> &fs, const std::string &needle)
{
    return std::any_of(fs.begin(), fs.end(), [&](const Finding &f) { return f.message.find(needle) != std::string::npos; });
}

} // namespace

TEST(Links, FixtureLinksAreValid)
{
    Fixture f;
    auto r = validate_links(f.doc.links, f.doc.written, f.doc.lean);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(f.doc.links.block_links.size(), 8u);
    EXPECT_EQ(f.doc.links.var_links.at({2, "n"}), "n");
    EXPECT_EQ(f.doc.links.var_links.at({5, "r"}), "r");
}

TEST(Links, ViolationsAreReported)
{
    Fixture f;
    auto links = f.doc.links;
    links.block_links.erase(3);
    links.block_links[9] = {99};
    links.var_links[{5, "r"}] = "hr";
    links.var_links[{6, "s"}] = "nonexistent";
    auto r = validate_links(links, f.doc.written, f.doc.lean);
    EXPECT_TRUE(mentions(r.violations, "step 3 has no block link"));
    EXPECT_TRUE(mentions(r.violations, "no prose step 9"));
    EXPECT_TRUE(mentions(r.violations, "no Lean step block 99"));
    EXPECT_TRUE(mentions(r.violations, "several targets"));
    EXPECT_TRUE(mentions(r.violations, "does not occur"));
    EXPECT_TRUE(mentions(r.warnings, "has no prose step"));
}

TEST(Links, NonAdjacentStepsForOneBlock)
{
    Fixture f;
    auto links = f.doc.links;
    links.block_links[5].push_back(links.block_links[2].front());
    auto r = validate_links(links, f.doc.written, f.doc.lean);
    EXPECT_TRUE(mentions(r.violations, "non-adjacent"));
}

TEST(Links, ParseResponse)
{
    auto p = parse_link_response("Sure:\n```json\n[{\"step\": 2, \"name\": \"n\", \"lean\": \"n\"}, {\"step\": \"x\"}]\n```");
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].step, 2);
    EXPECT_EQ(p[0].lean, "n");
    EXPECT_THROW(parse_link_response("no array here"), ProviderHTTPError);
    EXPECT_THROW(parse_link_response("[not json]"), ProviderHTTPError);
}

#include "support.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/templater/templater.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace explorable;
using namespace explorable::testing;

TEST(Template, ParseKeysAndEscapes)
{
    auto p = parse_template("a = {{a}}, b = {{ b }}, literal \\{{a}}");
    EXPECT_TRUE(p.problems.empty());
    EXPECT_EQ(p.keys, (std::set<std::string>{"a", "b"}));
    auto t = make_template(1, "a = {{a}}, literal \\{{a}}");
    EXPECT_EQ(instantiate(t, {{"a", std::int64_t{4}}}), "a = 4, literal {{a}}");
}

TEST(Template, ProblemsAreReported)
{
    EXPECT_FALSE(parse_template("{{a").problems.empty());
    EXPECT_FALSE(parse_template("a}}").problems.empty());
    EXPECT_FALSE(parse_template("{{1x}}").problems.empty());
    EXPECT_FALSE(parse_template("{{}}").problems.empty());
}

TEST(Template, ValidateAgainstKeys)
{
    auto t = make_template(4, "r = {{r}}, s = {{q}}");
    auto r = validate_template(t, {"r", "s", "x"});
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.violations.front().message.find("q"), std::string::npos);
    EXPECT_TRUE(validate_template(make_template(4, "r = {{r}}"), {"r"}).ok());
}

TEST(Template, MissingKeysAreAllNamed)
{
    auto t = make_template(1, "{{a}} {{b}} {{c}}");
    try {
        instantiate(t, {{"b", std::int64_t{1}}});
        FAIL() << "expected MissingKey";
    } catch (const MissingKey &e) {
        std::string m = e.what();
        EXPECT_NE(m.find("a"), std::string::npos);
        EXPECT_NE(m.find("c"), std::string::npos);
    }
}

TEST(Template, ValuesRender)
{
    auto t = make_template(1, "{{n}} {{h}} {{s}}");
    EXPECT_EQ(instantiate(t, {{"n", std::int64_t{-3}}, {"h", true}, {"s", SymbolicValue{"x + 1"}}}), "-3 true x + 1");
}

TEST(Template, RandomTextWithoutBracesIsVerbatim)
{
    std::mt19937 rng(5);
    const std::string alphabet = "ab {}\\x=1^*";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        int len = static_cast<int>(rng() % 40);
        for (int j = 0; j < len; ++j)
            s += alphabet[rng() % alphabet.size()];
        auto p = parse_template(s);
        if (!p.problems.empty() || !p.keys.empty() || s.find("\\{{") != std::string::npos)
            continue;
        EXPECT_EQ(instantiate(make_template(1, s), {}), s);
    }
}

TEST(Template, RandomPlaceholdersRoundTrip)
{
    std::mt19937 rng(9);
    for (int i = 0; i < 300; ++i) {
        std::string tmpl, expect;
        std::map<std::string, ReducedValue> values;
        int parts = 1 + static_cast<int>(rng() % 6);
        for (int j = 0; j < parts; ++j) {
            std::string key = std::string(1, static_cast<char>('a' + rng() % 5));
            std::int64_t v = static_cast<std::int64_t>(rng() % 2001) - 1000;
            values[key] = v;
            tmpl += " + {{" + key + "}}";
        }
        for (std::size_t k = 0; k < tmpl.size();) {
            if (tmpl.compare(k, 2, "{{") == 0) {
                std::string key(1, tmpl[k + 2]);
                expect += render_value(values[key]);
                k += 5;
            } else {
                expect += tmpl[k++];
            }
        }
        EXPECT_EQ(instantiate(make_template(1, tmpl), values), expect);
    }
}

TEST(Template, KeysFollowLinkedPropositions)
{
    ScratchDir dir("keys");
    LeanRunner runner;
    auto doc = build_document("b11", runner, fixture_config(dir.path()));
    EXPECT_EQ(template_keys(doc, 1), (std::set<std::string>{"x"}));
    EXPECT_EQ(template_keys(doc, 2), (std::set<std::string>{"n", "x"}));
    EXPECT_EQ(template_keys(doc, 4), (std::set<std::string>{"n", "r", "s", "x"}));
    // The fixture's first step-4 template used an unknown key and was regenerated.
    EXPECT_EQ(doc.templates.at(4).keys, (std::set<std::string>{"n", "r", "s"}));
    EXPECT_EQ(doc.templates.at(2).template_text, "x^2 - 1 = {{x}}^2 - 1 = {{n}}");
}

#include "explorable/core/errors.hpp"
#include "explorable/prober/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace explorable;

namespace {

std::vector<bool> sieve(int n)
{
    std::vector<bool> p(n + 1, true);
    p[0] = p[1] = false;
    for (int i = 2; i * i <= n; ++i)
        if (p[i])
            for (int j = i * i; j <= n; j += i)
                p[j] = false;
    return p;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    return static_cast<std::int64_t>(std::floor(static_cast<long double>(a) / static_cast<long double>(b)));
}

std::int64_t ev(const std::string &src, std::map<std::string, std::int64_t> vars = {})
{
    return oracle::Program::compile(src).eval(vars);
}

} // namespace

TEST(Oracle, PrimeMatchesSieve)
{
    auto p = sieve(5000);
    for (int v = -5000; v <= 5000; ++v)
        ASSERT_EQ(oracle::prime(v), p[std::abs(v)]) << v;
}

TEST(Oracle, IsSquareMatchesFloatingRoot)
{
    for (std::int64_t v = -50; v <= 200000; ++v) {
        bool expect = false;
        if (v >= 0) {
            auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
            expect = r * r == v;
        }
        ASSERT_EQ(oracle::is_square(v), expect) << v;
    }
    EXPECT_TRUE(oracle::is_square(3037000499LL * 3037000499LL));
    EXPECT_FALSE(oracle::is_square(std::numeric_limits<std::int64_t>::max()));
}

TEST(Oracle, FloorDivisionAndModulo)
{
    for (std::int64_t a = -30; a <= 30; ++a)
        for (std::int64_t b = -7; b <= 7; ++b) {
            if (b == 0)
                continue;
            std::map<std::string, std::int64_t> vars{{"a", a}, {"b", b}};
            ASSERT_EQ(ev("a / b", vars), floor_div(a, b)) << a << "/" << b;
            ASSERT_EQ(ev("a % b", vars), a - b * floor_div(a, b)) << a << "%" << b;
        }
    EXPECT_THROW(ev("1 / 0"), OracleError);
}

TEST(Oracle, PrecedenceAndFunctions)
{
    EXPECT_EQ(ev("2 + 3 * 4"), 14);
    EXPECT_EQ(ev("-2 ^ 2"), -4);
    EXPECT_EQ(ev("2 ^ 3 ^ 2"), 512);
    EXPECT_EQ(ev("(1 + 2) * 3 == 9 && !(2 > 3)"), 1);
    EXPECT_EQ(ev("min(3, -1) + max(3, -1) + abs(-5)"), 7);
    EXPECT_EQ(ev("divides(3, 12) && !divides(5, 12)"), 1);
    EXPECT_EQ(ev("0 || 0 || 4 >= 4"), 1);
}

TEST(Oracle, RandomArithmeticMatchesDirectEvaluation)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> d(-1000, 1000);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t x = d(rng), y = d(rng), z = d(rng);
        std::map<std::string, std::int64_t> vars{{"x", x}, {"y", y}, {"z", z}};
        ASSERT_EQ(ev("x * y - z + 3", vars), x * y - z + 3);
        ASSERT_EQ(ev("x ^ 2 - 1", vars), x * x - 1);
        ASSERT_EQ(ev("(x - 1) * (x + 1) == x ^ 2 - 1", vars), 1);
        ASSERT_EQ(ev("x < y || y <= z", vars), (x < y || y <= z) ? 1 : 0);
    }
}

TEST(Oracle, CorpusPredicatesAgreeWithHandComputation)
{
    auto hyp = oracle::Program::compile("x > 2");
    auto concl = oracle::Program::compile("!prime(x^2 - 1)");
    for (std::int64_t x = -10; x <= 10; ++x) {
        EXPECT_EQ(hyp.holds({{"x", x}}), x > 2);
        // x^2 - 1 = (x-1)(x+1) is prime exactly for x = ±2.
        EXPECT_EQ(concl.holds({{"x", x}}), std::abs(x) != 2) << x;
    }
    auto square = oracle::Program::compile("is_square(n*(n+1)*(n+2)*(n+3) + 1)");
    for (std::int64_t n = -10; n <= 10; ++n)
        EXPECT_TRUE(square.holds({{"n", n}})) << n;
}

TEST(Oracle, OverflowRaises)
{
    EXPECT_THROW(ev("x * x", {{"x", 4000000000LL}}), OracleError);
    EXPECT_THROW(ev("2 ^ 70"), OracleError);
    EXPECT_THROW(ev("-x", {{"x", std::numeric_limits<std::int64_t>::min()}}), OracleError);
    EXPECT_EQ(ev("(-1) ^ 1000001"), -1);
    EXPECT_EQ(ev("0 ^ 0"), 1);
}

TEST(Oracle, SyntaxAndNameErrors)
{
    EXPECT_THROW(oracle::Program::compile("x >"), OracleError);
    EXPECT_THROW(oracle::Program::compile("foo(1)"), OracleError);
    EXPECT_THROW(oracle::Program::compile("prime(1, 2)"), OracleError);
    EXPECT_THROW(oracle::Program::compile("(1 + 2"), OracleError);
    EXPECT_THROW(ev("y + 1"), OracleError);
    EXPECT_THROW(ev("2 ^ -1"), OracleError);
}

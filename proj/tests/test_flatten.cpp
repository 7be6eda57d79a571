#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "takagi/errors.hpp"
#include "takagi/flatten.hpp"

using namespace takagi;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

} // namespace

TEST_CASE("n_plus examples")
{
    const Params p(2);
    const auto a = n_plus(p, q("5/12"), 10);
    CHECK(a.exact);
    CHECK(a.value == 2);
    const auto b = n_plus(p, q("2/3"), 10);
    CHECK(b.exact);
    CHECK(b.value == 0);
    const auto c = n_plus(p, q("1/3"), 50);
    CHECK_FALSE(c.exact);
    CHECK(c.value == 50);
    CHECK_THROWS_AS(n_plus(p, q("3/8"), 10), PointInCorner);
}

TEST_CASE("rho examples")
{
    const Params p(2);
    const RhoStep a = rho(p, q("5/12"), 40);
    CHECK(a.rule == RhoRule::ReflectLeft);
    CHECK(a.n0 == 2);
    CHECK(a.j0 == 1);
    CHECK(a.output == q("1/3"));
    CHECK(eval(p, q("5/12")) == q("2/3"));

    const RhoStep b = rho(p, q("2/3"), 40);
    CHECK(b.rule == RhoRule::Complement);
    CHECK(b.output == q("1/3"));

    const RhoStep c = rho(p, q("1/3"), 50);
    CHECK(c.rule == RhoRule::Fixed);
    CHECK(c.budget_limited);
    CHECK(c.output == q("1/3"));

    const std::string text = to_text(a);
    CHECK(text.find("rule reflectLeft") != std::string::npos);
    CHECK(text.find("output 1/3") != std::string::npos);
}

TEST_CASE("rho reflect-right branch")
{
    // Find a point in the leftmost child of I_{n0}(x) and check the formula.
    const Params p(3);
    Stream s(31);
    int seen = 0;
    for (int i = 0; i < 2000 && seen < 20; ++i) {
        const Rational x = testing_support::random_non_corner(s, p, 3000, 41);
        const RhoStep st = rho(p, x, 40);
        if (st.rule != RhoRule::ReflectRight) {
            continue;
        }
        ++seen;
        const Rational rn(ipow(3, static_cast<unsigned long>(st.n0)));
        const Rational edge = Rational(st.j0 * 3 + 1, Integer(2)) / rn;
        CHECK(x < edge);
        CHECK(st.output == Rational(2) * edge - x);
        CHECK(eval(p, st.output) == eval(p, x));
    }
    CHECK(seen >= 10);
}

TEST_CASE("rho property suite on random non-corner rationals")
{
    const long budget = 40;
    Stream s(32);
    for (long r : {2L, 3L, 4L, 5L}) {
        const Params p(r);
        for (int i = 0; i < 250; ++i) {
            const Rational x = testing_support::random_non_corner(s, p, 4000, budget + 1);
            const RhoStep st = rho(p, x, budget);
            const SlopeProfile sx = slope_profile(p, x, budget);
            const bool all_nonneg = std::all_of(sx.slopes.begin(), sx.slopes.end(), [](long v) { return v >= 0; });
            // fixed iff every observed slope is nonnegative
            CHECK((st.rule == RhoRule::Fixed) == all_nonneg);
            CHECK(eval(p, st.output) == eval(p, x));
            if (st.rule == RhoRule::Fixed) {
                CHECK(st.output == x);
                continue;
            }
            CHECK(st.output != x);
            const SlopeProfile sy = slope_profile(p, st.output, budget);
            for (std::size_t n = 0; n < sx.slopes.size(); ++n) {
                CHECK(std::abs(sx.slopes[n]) == std::abs(sy.slopes[n]));
            }
            if (st.n0 >= 1) {
                CHECK(locate(p, st.n0, st.output) == locate(p, st.n0, x));
                CHECK(sy.slopes[static_cast<std::size_t>(st.n0) + 1] > 0);
            }
            const SlopeBound before = n_plus(p, x, budget);
            const SlopeBound after = n_plus(p, st.output, budget);
            CHECK(before.exact);
            CHECK(after.value > before.value);
        }
    }
}

TEST_CASE("pi examples and properties")
{
    const Params p(2);
    CHECK(pi(p, q("2/3"), 40) == q("1/3"));
    CHECK(pi(p, q("5/12"), 40) == q("1/3"));
    CHECK(pi(p, q("1/3"), 40) == q("1/3"));

    Stream s(33);
    for (long r : {2L, 3L}) {
        const Params pr(r);
        for (int i = 0; i < 100; ++i) {
            const Rational x = testing_support::random_non_corner(s, pr, 3000, 41);
            const Rational y = pi(pr, x, 40);
            CHECK(eval(pr, y) == eval(pr, x));
            const SlopeProfile sy = slope_profile(pr, y, 40);
            const SlopeProfile sx = slope_profile(pr, x, 40);
            for (std::size_t n = 0; n < sy.slopes.size(); ++n) {
                CHECK(sy.slopes[n] >= 0);
                CHECK(sy.slopes[n] == std::abs(sx.slopes[n]));
            }
        }
    }
    CHECK_THROWS_AS(pi(p, q("5/12"), 40, 0), BudgetInconclusive);
}

TEST_CASE("rho_infinity")
{
    const Params p(2);
    const auto a = rho_infinity(p, q("5/12"), 40, 30);
    REQUIRE(a.exact);
    CHECK(*a.exact == q("1/3"));
    CHECK(*rho_infinity(p, q("2/3"), 40, 30).exact == q("1/3"));
    CHECK(*rho_infinity(p, q("1/3"), 40, 30).exact == q("1/3"));
    CHECK_THROWS_AS(rho_infinity(p, q("5/12"), 40, 30, 0), BudgetInconclusive);
    // a coarse enclosure is accepted when iterations run out
    const auto b = rho_infinity(p, q("5/12"), 40, 1, 0);
    REQUIRE(b.enclosure);
    CHECK(contains(p, *b.enclosure, q("1/3")));
}

TEST_CASE("preimages of rho")
{
    const Params p(2);
    const PreimageSet set = preimages_rho(p, q("1/3"), 6);
    const auto has = [&](const char* v) {
        return std::find(set.values.begin(), set.values.end(), q(v)) != set.values.end();
    };
    CHECK(has("2/3"));
    CHECK(has("5/12"));
    CHECK(has("1/3"));
    for (const auto& c : set.values) {
        CHECK(rho(p, c, set.budget).output == q("1/3"));
    }
    CHECK(static_cast<long>(set.values.size()) <= 2 * 6 + 2);

    // z not fixed: z itself is excluded
    const PreimageSet other = preimages_rho(p, q("2/3"), 6);
    CHECK(std::find(other.values.begin(), other.values.end(), q("2/3")) == other.values.end());

    Stream s(34);
    for (long r : {2L, 3L, 5L}) {
        const Params pr(r);
        for (int i = 0; i < 40; ++i) {
            const Rational x = testing_support::random_non_corner(s, pr, 2000, 30);
            const RhoStep st = rho(pr, x, 20);
            if (st.rule == RhoRule::Fixed || st.n0 > 12) {
                continue;
            }
            const PreimageSet ps = preimages_rho(pr, st.output, 12);
            CHECK(std::find(ps.values.begin(), ps.values.end(), x) != ps.values.end());
            for (const auto& c : ps.values) {
                CHECK(rho(pr, c, ps.budget).output == st.output);
            }
        }
    }
}

TEST_CASE("zero structure")
{
    const auto third = zero_structure(Params(2), q("1/3"), 1000);
    CHECK(third.infinite);
    const auto worked = zero_structure(Params(3), q("17/108"), 1000);
    CHECK_FALSE(worked.infinite);
    CHECK(worked.zeros.empty());
    CHECK(worked.last_zero() == 0);
    CHECK(worked.drift == 0);
    CHECK_THROWS_AS(zero_structure(Params(2), q("3/8"), 100), PointInCorner);
    CHECK_THROWS_AS(zero_structure(Params(2), q("1/10007"), 10), BudgetInconclusive);

    // agrees with the observed slope walk over several periods
    Stream s(35);
    for (long r : {2L, 3L, 4L}) {
        const Params p(r);
        for (int i = 0; i < 200; ++i) {
            const Rational x = testing_support::random_non_corner(s, p, 300, 2000);
            const auto zs = zero_structure(p, x, 10000);
            const long horizon = static_cast<long>(zs.preperiod + 6 * zs.period) + 60;
            const auto observed = slope_profile(p, x, horizon).zero_times();
            if (zs.infinite) {
                CHECK(observed.size() >= 5);
                continue;
            }
            std::vector<long> within;
            for (long z : zs.zeros) {
                if (z <= horizon) {
                    within.push_back(z);
                }
            }
            CHECK(observed == within);
        }
    }
}

TEST_CASE("equivalence relation")
{
    const Params p3(3);
    CHECK(equivalent(p3, q("17/108"), q("17/108"), 1000));
    CHECK_FALSE(equivalent(p3, q("17/108"), q("37/108"), 1000));
    CHECK_THROWS_AS(equivalent(Params(2), q("1/3"), q("2/3"), 50), BudgetInconclusive);

    // x and a point differing by m r^-n inside the same I_n with the same n(x)
    Stream s(36);
    int positives = 0;
    for (int i = 0; i < 400 && positives < 5; ++i) {
        const Rational x = testing_support::random_non_corner(s, p3, 500, 3000);
        const auto zs = zero_structure(p3, x, 10000);
        if (zs.infinite || zs.last_zero() == 0) {
            continue;
        }
        const long n = zs.last_zero();
        const Rational step = inverse_power(3, static_cast<unsigned long>(n));
        for (int m : {-1, 1}) {
            const Rational x2 = x + Rational(m) * step;
            if (x2.sign() <= 0 || x2 >= Rational(1) || corner_level(p3, x2, 3000)) {
                continue;
            }
            const auto zs2 = zero_structure(p3, x2, 10000);
            const bool expect = !zs2.infinite && zs2.last_zero() == n && locate(p3, n, x) == locate(p3, n, x2);
            if (zs2.infinite) {
                CHECK_THROWS_AS(equivalent(p3, x, x2, 10000), BudgetInconclusive);
                continue;
            }
            CHECK(equivalent(p3, x, x2, 10000) == expect);
            positives += expect ? 1 : 0;
        }
    }
}

TEST_CASE("classification")
{
    const Params p(2);
    const PointClass corner = classify(p, q("3/8"), 10);
    CHECK(corner.in_corner);
    CHECK(corner.corner_level == 2L);

    const PointClass third = classify(p, q("1/3"), 20);
    CHECK_FALSE(third.in_corner);
    CHECK(third.sign == SignProfile::AllNonneg);
    CHECK(third.zero_count == 10);

    const PointClass neg = classify(p, q("5/12"), 20);
    CHECK(neg.sign == SignProfile::FirstNegative);
    CHECK(neg.first_negative == 3);

    const PointClass pos = classify(Params(3), q("17/108"), 30);
    CHECK(pos.sign == SignProfile::AllPositive);
    CHECK(pos.zero_count == 0);

    // monotone in budget: a corner seen at a small budget stays a corner
    CHECK(classify(p, q("3/8"), 40).in_corner);
    CHECK_FALSE(classify(p, q("3/8"), 1).in_corner);
}

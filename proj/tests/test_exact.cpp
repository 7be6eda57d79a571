#include <doctest.h>

#include "support.hpp"
#include "takagi/errors.hpp"
#include "takagi/exact.hpp"
#include "takagi/levelset.hpp"

using namespace takagi;
using testing_support::random_non_corner;
using testing_support::random_rational;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

} // namespace

TEST_CASE("rational canonical form and text")
{
    CHECK(Rational(Integer(6), Integer(-4)).to_string() == "-3/2");
    CHECK(Rational(Integer(4), Integer(2)).to_string() == "2");
    CHECK(q("10/4") == q("5/2"));
    CHECK(q("-7") == Rational(-7));
    CHECK_THROWS_AS(q("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(q("1/"), std::invalid_argument);
    CHECK_THROWS_AS(q("x"), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    CHECK(q("7/3").floor() == 2);
    CHECK(q("-7/3").floor() == -3);
    CHECK(q("-7/3").frac() == q("2/3"));

    Stream s(11);
    for (int i = 0; i < 500; ++i) {
        const Rational x = random_rational(s, 1000) - Rational(static_cast<long>(s.below(7))) ;
        CHECK(Rational::parse(x.to_string()) == x);
    }
}

TEST_CASE("phi examples and symmetries")
{
    CHECK(phi(0) == 0);
    CHECK(phi(q("1/2")) == q("1/2"));
    CHECK(phi(q("7/10")) == q("3/10"));
    Stream s(1);
    for (int i = 0; i < 1000; ++i) {
        const Rational x = random_rational(s, 500) + Rational(static_cast<long>(s.below(5))) - Rational(2);
        CHECK(phi(x) == testing_support::phi_oracle(x));
        CHECK(phi(x) == phi(x + Rational(1)));
        CHECK(phi(x) == phi(-x));
        CHECK(phi(x) >= 0);
        CHECK(phi(x) <= q("1/2"));
    }
}

TEST_CASE("partial sums")
{
    CHECK(partial_sum(Params(2), 0, q("1/3")) == 0);
    CHECK(partial_sum(Params(2), 2, q("1/4")) == q("1/2"));
    CHECK(partial_sum(Params(3), 1, q("17/108")) == q("17/108"));

    // direct summation oracle
    Stream s(2);
    for (long r = 2; r <= 7; ++r) {
        const Params p(r);
        for (int i = 0; i < 100; ++i) {
            const Rational x = random_rational(s, 300);
            const long n = static_cast<long>(s.below(12));
            Rational direct;
            for (long k = 0; k < n; ++k) {
                direct += inverse_power(r, static_cast<unsigned long>(k)) *
                          testing_support::phi_oracle(Rational(ipow(r, static_cast<unsigned long>(k))) * x);
            }
            CHECK(partial_sum(p, n, x) == direct);
        }
    }
}

TEST_CASE("eval examples")
{
    CHECK(eval(Params(3), q("17/108")) == q("3/8"));
    CHECK(eval(Params(3), q("37/108")) == q("3/8"));
    CHECK(eval(Params(2), 0) == 0);
    CHECK(eval(Params(2), q("1/3")) == q("2/3"));
    CHECK(eval(Params(3), q("1/2")) == q("3/4"));
    CHECK(eval(Params(5), q("1/2")) == q("5/8"));
    // arguments are reduced mod 1
    CHECK(eval(Params(2), q("4/3")) == q("2/3"));
    CHECK(eval(Params(2), q("-2/3")) == q("2/3"));
    CHECK(eval(Params(2), 1) == 0);
}

TEST_CASE("eval against the orbit oracle")
{
    Stream s(3);
    for (long r = 2; r <= 9; ++r) {
        const Params p(r);
        for (int i = 0; i < 150; ++i) {
            const Rational x = random_rational(s, 2000);
            CHECK(eval(p, x) == testing_support::eval_oracle(r, x));
        }
    }
}

TEST_CASE("eval symmetry, tail identity and range")
{
    Stream s(4);
    for (long r : {2L, 3L, 4L, 5L}) {
        const Params p(r);
        const Rational m = max_upper_bound(p);
        for (int i = 0; i < 1000; ++i) {
            Rational x = random_rational(s, 5000);
            if (x.sign() == 0) {
                continue;
            }
            const Rational fx = eval(p, x);
            CHECK(fx == eval(p, Rational(1) - x));
            CHECK(fx >= 0);
            CHECK(fx <= m);
            if (i % 4 == 0) {
                const long n = static_cast<long>(s.below(13));
                const Rational shifted = (Rational(ipow(r, static_cast<unsigned long>(n))) * x).frac();
                CHECK(fx - partial_sum(p, n, x) == inverse_power(r, static_cast<unsigned long>(n)) * eval(p, shifted));
            }
        }
    }
}

TEST_CASE("eval agrees with the depth-40 partial sum within the tail bound")
{
    Stream s(5);
    for (long r : {2L, 3L, 6L}) {
        const Params p(r);
        const Rational bound = inverse_power(r, 40) * max_upper_bound(p);
        for (int i = 0; i < 1000; ++i) {
            const Rational x = random_rational(s, 10000);
            const Rational gap = eval(p, x) - partial_sum(p, 40, x);
            CHECK(gap >= 0);
            CHECK(gap <= bound);
        }
    }
}

TEST_CASE("slope profile examples")
{
    CHECK(slope_profile(Params(3), q("17/108"), 6).slopes == std::vector<long>{0, 1, 2, 3, 4, 3, 4});
    CHECK(slope_profile(Params(2), q("1/3"), 4).slopes == std::vector<long>{0, 1, 0, 1, 0});
    CHECK(slope_profile(Params(2), q("5/12"), 3).slopes == std::vector<long>{0, 1, 0, -1});
    CHECK_THROWS_AS(slope_profile(Params(2), q("1/4"), 5), PointInCorner);
    CHECK_THROWS_AS(slope_profile(Params(3), q("1/18"), 2), PointInCorner);
    CHECK_NOTHROW(slope_profile(Params(3), q("1/18"), 1));
    CHECK_THROWS_AS(slope_profile(Params(2), q("3/2"), 5), OutOfRange);
    CHECK_THROWS_AS(slope_profile(Params(2), q("1/3"), kMaxDepth + 1), DepthCap);
}

TEST_CASE("slopes match difference quotients and interval slopes")
{
    Stream s(6);
    for (long r = 2; r <= 6; ++r) {
        const Params p(r);
        for (int i = 0; i < 60; ++i) {
            const Rational x = random_non_corner(s, p, 3000, 14);
            const SlopeProfile prof = slope_profile(p, x, 14);
            for (long k = 0; k <= 14; ++k) {
                const long sk = prof.slopes[static_cast<std::size_t>(k)];
                if (k < 14) {
                    const long d = prof.slopes[static_cast<std::size_t>(k) + 1] - sk;
                    CHECK((d == 1 || d == -1));
                }
                CHECK(Rational(sk) == testing_support::slope_oracle(p, k, x));
                if (k >= 1) {
                    CHECK(interval_slope(p, locate(p, k, x)) == sk);
                }
            }
        }
    }
}

TEST_CASE("interval slopes and locate")
{
    CHECK(interval_slope(Params(2), {1, 0}) == 1);
    CHECK(interval_slope(Params(2), {2, 1}) == 0);
    CHECK(interval_slope(Params(2), {2, 3}) == -2);
    CHECK(locate(Params(2), 2, q("5/12")) == IntervalAddress{2, 1});
    CHECK(locate(Params(3), 1, q("17/108")) == IntervalAddress{1, 0});
    CHECK(locate(Params(2), 3, q("5/12")) == IntervalAddress{3, 3});
    CHECK(locate(Params(2), 0, q("5/12")) == IntervalAddress{0, 0});
    CHECK_THROWS_AS(locate(Params(2), 3, q("1")), OutOfRange);

    const Params p(3);
    const auto kids = children(p, {2, 4});
    REQUIRE(kids.size() == 3);
    CHECK(kids[0] == IntervalAddress{3, 12});
    CHECK(kids[2] == IntervalAddress{3, 14});
    CHECK(left_endpoint(p, kids[0]) == left_endpoint(p, {2, 4}));
    CHECK(right_endpoint(p, kids[2]) == right_endpoint(p, {2, 4}));
    CHECK(children(p, {0, 0}).size() == 2);
}

TEST_CASE("chord slope examples")
{
    const auto even = chord_slopes(Params(2), 0, 12);
    for (const auto& c : even) {
        CHECK(c.slope == Rational(c.n + 1));
        CHECK(c.v - c.u == Rational(Integer(1), 2 * ipow(2, static_cast<unsigned long>(c.n))));
    }
    const auto odd = chord_slopes(Params(3), 0, 12);
    for (const auto& c : odd) {
        CHECK(c.slope == Rational(c.n) + q("3/2"));
    }
    const auto third = chord_slopes(Params(2), q("1/3"), 20);
    for (std::size_t n = 0; n + 1 < third.size(); ++n) {
        const Rational d = third[n + 1].slope - third[n].slope;
        CHECK((d == Rational(1) || d == Rational(-1)));
    }
}

TEST_CASE("chord slope identities on random rationals")
{
    Stream s(7);
    for (long r = 2; r <= 5; ++r) {
        const Params p(r);
        const Rational odd_residual(r, r - 1);
        for (int i = 0; i < 40; ++i) {
            const Rational x = random_rational(s, 400);
            const auto chords = chord_slopes(p, x, 20);
            for (std::size_t n = 0; n < chords.size(); ++n) {
                const auto& c = chords[n];
                CHECK(c.u <= x);
                CHECK(x < c.v);
                if (p.even()) {
                    CHECK(c.residual == Rational(phi_plus(p, c.n, x)));
                } else {
                    CHECK(c.residual.abs() == odd_residual);
                }
            }
        }
    }
}

TEST_CASE("orbit structure")
{
    const auto o = orbit(Params(3), q("17/108"));
    REQUIRE(o);
    CHECK(o->denominator == 108);
    for (std::size_t k = 0; k < 30; ++k) {
        const Rational direct = (Rational(ipow(3, k)) * q("17/108")).frac();
        CHECK(Rational(o->at(k), o->denominator) == direct);
    }
    CHECK(!orbit(Params(2), q("1/1001"), 3));
}

TEST_CASE("corner levels")
{
    CHECK(corner_level(Params(2), 0, 5) == 0L);
    CHECK(corner_level(Params(2), q("1/2"), 5) == 0L);
    CHECK(corner_level(Params(2), q("3/8"), 5) == 2L);
    CHECK(corner_level(Params(3), q("1/18"), 5) == 2L);
    CHECK(!corner_level(Params(3), q("1/18"), 1));
    CHECK(!corner_level(Params(2), q("1/3"), 100));
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "takagi/crw.hpp"
#include "takagi/errors.hpp"
#include "takagi/levelset.hpp"
#include "takagi/selfsim.hpp"

using namespace takagi;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

// Slope of f_r^k on the depth-k ancestor of (n, j), from partial sums at the
// ancestor's endpoints.
long ancestor_slope(const Params& p, const IntervalAddress& a, long k)
{
    const IntervalAddress anc = locate(p, k, left_endpoint(p, a));
    const Rational rise = partial_sum(p, k, right_endpoint(p, anc)) - partial_sum(p, k, left_endpoint(p, anc));
    return (rise / width(p, k)).numerator().get_si();
}

std::vector<IntervalAddress> brute_aplus(const Params& p, long max_depth)
{
    std::vector<IntervalAddress> out;
    for (long n = 1; n <= max_depth; ++n) {
        const Integer count = interval_count(p, n);
        for (Integer j = 0; j < count; ++j) {
            const IntervalAddress a{n, j};
            bool ok = ancestor_slope(p, a, n) == 0;
            for (long k = 1; k < n && ok; ++k) {
                ok = ancestor_slope(p, a, k) >= 0;
            }
            if (ok) {
                out.push_back(a);
            }
        }
    }
    return out;
}

bool covers(const Params& p, const LevelSetCover& c, const Rational& x)
{
    return std::any_of(c.intervals.begin(), c.intervals.end(), [&](const CoverInterval& iv) {
        return left_endpoint(p, iv.address) <= x && x <= right_endpoint(p, iv.address);
    });
}

} // namespace

TEST_CASE("maximum enclosures")
{
    const MaxEnclosure m2 = max_value(Params(2), 40);
    CHECK(m2.lo <= q("2/3"));
    CHECK(q("2/3") <= m2.hi);
    CHECK(m2.width() <= inverse_power(2, 40));
    CHECK(eval(Params(2), m2.witness) == m2.lo);
    CHECK(!m2.exact);

    const MaxEnclosure m3 = max_value(Params(3), 40);
    REQUIRE(m3.exact);
    CHECK(*m3.exact == q("3/4"));
    CHECK(*max_value(Params(5), 40).exact == q("5/8"));
    CHECK_THROWS_AS(max_value(Params(2), 61), std::invalid_argument);

    for (long r = 2; r <= 8; ++r) {
        const Params p(r);
        const MaxEnclosure m = max_value(p, 20);
        CHECK(m.width() <= inverse_power(2, 20));
        CHECK(eval(p, m.witness) == m.lo);
        if (!p.even()) {
            REQUIRE(m.exact);
            CHECK(*m.exact == Rational(r, 2 * (r - 1)));
        }
        // no sampled value beats the upper bound
        Stream s(static_cast<std::uint64_t>(r));
        for (int i = 0; i < 300; ++i) {
            CHECK(eval(p, testing_support::random_rational(s, 3000)) <= m.hi);
        }
    }
    CHECK(certified_max(Params(2)).width() <= inverse_power(2, kCertifiedMaxPrecision));
    CHECK(max_upper_bound(Params(3)) == q("3/4"));
}

TEST_CASE("A+ enumeration examples")
{
    const Params p(2);
    const auto two = enumerate_aplus(p, 2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].address == IntervalAddress{2, 1});
    CHECK(two[0].base == q("1/2"));
    CHECK(two[0].range_hi == q("2/3"));
    CHECK(enumerate_aplus(p, 1).empty());

    const auto four = enumerate_aplus(p, 4);
    const auto it = std::find_if(four.begin(), four.end(),
                                 [](const FlatRecord& f) { return f.address == IntervalAddress{4, 5}; });
    REQUIRE(it != four.end());
    CHECK(locate(p, 4, q("1/3")) == IntervalAddress{4, 5});
    const auto prof = slope_profile(p, q("1/3"), 4);
    CHECK(prof.slopes == std::vector<long>{0, 1, 0, 1, 0});
    CHECK_THROWS_AS(enumerate_aplus(p, 30), DepthCap);
}

TEST_CASE("A+ enumeration matches brute force")
{
    for (long r = 2; r <= 5; ++r) {
        const Params p(r);
        const long depth = r == 2 ? 8 : 5;
        const auto fast = enumerate_aplus(p, depth);
        const auto slow = brute_aplus(p, depth);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast[i].address == slow[i]);
            CHECK(fast[i].base == partial_sum(p, slow[i].n, left_endpoint(p, slow[i])));
        }
    }
}

TEST_CASE("A+ widths reproduce a_n")
{
    for (long r = 2; r <= 5; ++r) {
        const Params p(r);
        const auto recs = enumerate_aplus(p, 6);
        const AbSequences ab = a_b_sequences(crw_parameter(r), 6);
        for (long n = 1; n <= 6; ++n) {
            Rational total;
            for (const auto& rec : recs) {
                if (rec.address.n == n) {
                    total += width(p, n);
                }
            }
            CHECK(total == ab.a_at(n));
        }
    }
}

TEST_CASE("A+(y)")
{
    const Params p2(2);
    const auto half = aplus_at(p2, q("1/2"), 2);
    REQUIRE(half.size() == 1);
    CHECK(half[0].address == IntervalAddress{2, 1});
    CHECK(aplus_at(p2, q("9/10"), 6).empty());
    CHECK(!aplus_at(Params(3), q("3/8"), 6).empty());

    Stream s(41);
    for (long r : {2L, 3L, 4L}) {
        const Params p(r);
        const auto all = enumerate_aplus(p, 7);
        const Rational hi = max_upper_bound(p);
        for (int i = 0; i < 30; ++i) {
            const Rational y = testing_support::random_rational(s, 500) * hi;
            std::vector<FlatRecord> expect;
            for (const auto& rec : all) {
                if (rec.range_lo <= y && y <= rec.range_hi) {
                    expect.push_back(rec);
                }
            }
            CHECK(aplus_at(p, y, 7) == expect);
        }
        CHECK(aplus_at(p, hi + q("1/1000"), 12).empty());
    }
}

TEST_CASE("cover examples")
{
    const Params p3(3);
    const LevelSetCover c = cover(p3, q("3/8"), 10);
    CHECK(covers(p3, c, q("17/108")));
    CHECK(covers(p3, c, q("37/108")));

    const Params p2(2);
    const LevelSetCover zero = cover(p2, 0, 8);
    REQUIRE(zero.intervals.size() == 2);
    CHECK(zero.intervals.front().address == IntervalAddress{8, 0});
    CHECK(zero.intervals.back().address == IntervalAddress{8, 255});
    CHECK(zero.clusters() == 2);

    CHECK(cover(p2, q("9/10"), 5).intervals.empty());
    CHECK_THROWS_AS(cover(p2, q("1/2"), 61), DepthCap);
}

TEST_CASE("cover soundness and monotonicity")
{
    Stream s(42);
    for (long r : {2L, 3L}) {
        const Params p(r);
        for (int i = 0; i < 8; ++i) {
            const Rational x = testing_support::random_non_corner(s, p, 2000, 60);
            const Rational y = eval(p, x);
            LevelSetCover prev = cover(p, y, 6);
            for (long n = 7; n <= 14; ++n) {
                const LevelSetCover cur = cover(p, y, n);
                CHECK(covers(p, cur, x));
                for (const auto& iv : cur.intervals) {
                    const bool inside = std::any_of(prev.intervals.begin(), prev.intervals.end(), [&](const CoverInterval& o) {
                        return left_endpoint(p, o.address) <= left_endpoint(p, iv.address) &&
                               right_endpoint(p, iv.address) <= right_endpoint(p, o.address);
                    });
                    CHECK(inside);
                }
                prev = cur;
            }
            // every representative of a witness tree is covered
            try {
                const WitnessTree tree = witness_tree(p, x, 2, 60);
                const LevelSetCover deep = cover(p, y, 16);
                for (const auto& leaf : tree.leaves()) {
                    CHECK(covers(p, deep, leaf.representative));
                }
            } catch (const NotEnoughZeros&) {
            }
        }
    }
}

TEST_CASE("cover trace")
{
    const Params p(2);
    const CoverTrace t = cover_trace(p, q("1/2"), 12);
    REQUIRE(t.intervals.size() == 12);
    CHECK(t.intervals.back() == cover(p, q("1/2"), 12).intervals.size());
    CHECK(t.clusters.back() == cover(p, q("1/2"), 12).clusters());
}

TEST_CASE("level points by bisection")
{
    const Params p(3);
    const auto z = find_level_point(p, q("3/8"), q("1/10"), q("1/5"), 30);
    REQUIRE(z);
    CHECK((eval(p, *z) - q("3/8")).abs() <= inverse_power(2, 30));
    CHECK(!find_level_point(p, q("9/10"), q("1/10"), q("1/5"), 10));
    CHECK(*find_level_point(p, q("3/8"), q("17/108"), q("1/5"), 10) == q("17/108"));
}

TEST_CASE("occupation histograms")
{
    const Params p(2);
    const auto mc = occupation_histogram(p, 64, MonteCarloMode{20000, 7});
    CHECK(std::fabs(mc.total_mass() - 1.0) <= 1e-12);
    CHECK(mc.masses.size() == 64);
    CHECK(std::all_of(mc.masses.begin(), mc.masses.end(), [](double m) { return m >= 0; }));
    CHECK(mc.smear == 0);
    CHECK(mc.seed == std::uint64_t{7});
    CHECK(to_csv(mc) == to_csv(occupation_histogram(p, 64, MonteCarloMode{20000, 7})));

    // bins above the maximum stay empty: bin b covers [b hi/B, (b+1) hi/B)
    const auto ex = occupation_histogram(p, 64, ExactDepthMode{14});
    CHECK(ex.exact);
    CHECK(std::fabs(ex.total_mass() - 1.0) <= 1e-12);
    CHECK(ex.smear == inverse_power(2, 14) * max_upper_bound(p));

    const auto odd = occupation_histogram(Params(3), 32, MonteCarloMode{5000, 1});
    CHECK(std::fabs(odd.total_mass() - 1.0) <= 1e-12);
    CHECK(odd.smear > 0);
    CHECK(odd.smear <= inverse_power(2, 64));

    // Monte Carlo binning agrees with exact evaluation at the same dyadic points
    Stream s(7, 0);
    const Rational hi = max_upper_bound(p);
    std::vector<double> manual(64, 0.0);
    for (int i = 0; i < 2000; ++i) {
        const Rational x = random_dyadic(s);
        const Integer b = (eval(p, x) / hi * Rational(64)).floor();
        manual[std::min<std::size_t>(b.get_ui(), 63)] += 1;
    }
    const auto small = occupation_histogram(p, 64, MonteCarloMode{2000, 7});
    for (std::size_t b = 0; b < 64; ++b) {
        CHECK(small.masses[b] * 2000 == doctest::Approx(manual[b]));
    }
    CHECK(small.concentration(1.0) <= 1.0);
    CHECK(to_csv(small).rfind("bin,lo,hi,mass\n", 0) == 0);
}

TEST_CASE("height-width bound")
{
    const Params p(2);
    const auto rep = heightwidth_check(p, enumerate_aplus(p, 2));
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].range_width == q("1/6"));
    CHECK(rep.entries[0].interval_width == q("1/4"));
    CHECK(rep.passed());

    const auto twelve = heightwidth_check(p, enumerate_aplus(p, 12));
    CHECK(twelve.passed());
    CHECK(twelve.total_width <= Rational(4));
    CHECK(twelve.bound == 4);
    for (long r = 3; r <= 6; ++r) {
        CHECK(heightwidth_check(Params(r), enumerate_aplus(Params(r), 5)).passed());
    }
}

TEST_CASE("finiteness scan")
{
    const Params p(2);
    ScanOptions opt;
    opt.samples = 0;
    const auto empty = finiteness_scan(p, opt);
    CHECK(empty.level_samples.empty());
    CHECK(empty.abscissa_samples.empty());

    opt.samples = 12;
    opt.depth = 16;
    opt.compare_depth = 10;
    opt.seed = 9;
    const auto a = finiteness_scan(p, opt);
    const auto b = finiteness_scan(p, opt);
    REQUIRE(a.level_samples.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(a.level_samples[i].y == b.level_samples[i].y);
        CHECK(a.level_samples[i].trace.clusters == b.level_samples[i].trace.clusters);
        CHECK(a.abscissa_samples[i].x == b.abscissa_samples[i].x);
        CHECK(a.level_samples[i].y <= max_upper_bound(p));
        if (a.abscissa_samples[i].found) {
            CHECK(a.abscissa_samples[i].certified >= 4);
        }
    }
    CHECK(a.median_clusters().size() == 16);
}

TEST_CASE("cover CSV")
{
    const Params p(2);
    const std::string csv = to_csv(p, cover(p, q("1/2"), 3));
    CHECK(csv.rfind("n,j,left,right,range_lo,range_hi\n", 0) == 0);
}

#pragma once

// Seeded generators and independent oracles shared by the test binaries.

#include <cstdint>
#include <map>
#include <vector>

#include "takagi/exact.hpp"
#include "takagi/random.hpp"

namespace testing_support {

using takagi::Integer;
using takagi::Params;
using takagi::Rational;
using takagi::Stream;

/// k/q with 2 <= q <= max_den and 0 <= k < q.
inline Rational random_rational(Stream& s, std::uint64_t max_den)
{
    const std::uint64_t q = 2 + s.below(max_den - 1);
    const std::uint64_t k = s.below(q);
    return Rational(Integer(static_cast<unsigned long>(k)), Integer(static_cast<unsigned long>(q)));
}

/// Random rational in (0,1) that is not a corner up to `depth`.
inline Rational random_non_corner(Stream& s, const Params& p, std::uint64_t max_den, long depth)
{
    for (;;) {
        Rational x = random_rational(s, max_den);
        if (x.sign() > 0 && !takagi::corner_level(p, x, depth)) {
            return x;
        }
    }
}

/// Distance to the nearest integer from the definition.
inline Rational phi_oracle(const Rational& x)
{
    const Rational f = x - Rational(x.floor());
    const Rational g = Rational(1) - f;
    return f < g ? f : g;
}

/// f_r(x) by orbit detection over rationals and a geometric tail, written
/// without the library's integer-residue machinery.
inline Rational eval_oracle(long r, const Rational& x)
{
    std::map<Rational, std::size_t> seen;
    std::vector<Rational> pts;
    Rational cur = x - Rational(x.floor());
    while (seen.find(cur) == seen.end()) {
        seen[cur] = pts.size();
        pts.push_back(cur);
        cur = Rational(r) * cur;
        cur = cur - Rational(cur.floor());
    }
    const std::size_t start = seen[cur];
    const std::size_t period = pts.size() - start;
    Rational head;
    Rational w(1);
    for (std::size_t k = 0; k < start; ++k) {
        head += w * phi_oracle(pts[k]);
        w = w / Rational(r);
    }
    Rational cycle;
    Rational v(1);
    for (std::size_t k = 0; k < period; ++k) {
        cycle += v * phi_oracle(pts[start + k]);
        v = v / Rational(r);
    }
    // sum over repeats: cycle * (1 + r^-p + r^-2p + ...) = cycle / (1 - r^-p)
    return head + w * cycle / (Rational(1) - v);
}

/// Slope of f_r^n at x by a one-sided difference quotient inside I_n(x).
inline Rational slope_oracle(const Params& p, long n, const Rational& x)
{
    if (n == 0) {
        return Rational(0);
    }
    const Rational right = takagi::right_endpoint(p, takagi::locate(p, n, x));
    const Rational h = (right - x) / Rational(2);
    return (takagi::partial_sum(p, n, x + h) - takagi::partial_sum(p, n, x)) / h;
}

} // namespace testing_support

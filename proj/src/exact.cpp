#include "takagi/exact.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "takagi/errors.hpp"

namespace takagi {

namespace {

struct IntegerHash {
    std::size_t operator()(const Integer& z) const noexcept
    {
        const std::size_t size = mpz_size(z.get_mpz_t());
        const std::size_t low = size == 0 ? 0 : mpz_getlimbn(z.get_mpz_t(), 0);
        return low ^ (size * 0x9e3779b97f4a7c15ULL);
    }
};

void require_unit_interval(const Rational& x, const char* what)
{
    if (x.sign() < 0 || x >= Rational(1)) {
        throw OutOfRange(std::string(what) + ": x = " + x.to_string() + " is outside [0,1)");
    }
}

} // namespace

void check_depth(long depth)
{
    if (depth < 0 || depth > kMaxDepth) {
        throw DepthCap("depth " + std::to_string(depth) + " outside [0, " + std::to_string(kMaxDepth) + "]");
    }
}

Params::Params(long r) : r_(r)
{
    if (r < 2) {
        throw std::invalid_argument("r must be >= 2, got " + std::to_string(r));
    }
}

Integer interval_count(const Params& p, long n) { return n == 0 ? Integer(1) : grid_denominator(p, n); }

Integer grid_denominator(const Params& p, long n)
{
    if (n == 0) {
        return 1;
    }
    return 2 * ipow(p.r(), static_cast<unsigned long>(n - 1));
}

bool is_valid(const Params& p, const IntervalAddress& a)
{
    return a.n >= 0 && a.j >= 0 && a.j < interval_count(p, a.n);
}

Rational left_endpoint(const Params& p, const IntervalAddress& a) { return Rational(a.j, grid_denominator(p, a.n)); }

Rational right_endpoint(const Params& p, const IntervalAddress& a)
{
    return Rational(a.j + 1, grid_denominator(p, a.n));
}

Rational width(const Params& p, long n) { return Rational(Integer(1), grid_denominator(p, n)); }

std::vector<IntervalAddress> children(const Params& p, const IntervalAddress& a)
{
    std::vector<IntervalAddress> out;
    if (a.n == 0) {
        out.push_back({1, 0});
        out.push_back({1, 1});
        return out;
    }
    out.reserve(static_cast<std::size_t>(p.r()));
    for (long i = 0; i < p.r(); ++i) {
        out.push_back({a.n + 1, a.j * p.r() + i});
    }
    return out;
}

bool contains(const Params& p, const IntervalAddress& a, const Rational& x)
{
    return left_endpoint(p, a) <= x && x < right_endpoint(p, a);
}

std::vector<long> SlopeProfile::zero_times() const
{
    std::vector<long> out;
    for (std::size_t n = 1; n < slopes.size(); ++n) {
        if (slopes[n] == 0) {
            out.push_back(static_cast<long>(n));
        }
    }
    return out;
}

const Integer& Orbit::at(std::size_t k) const
{
    if (k < residues.size()) {
        return residues[k];
    }
    return residues[preperiod + (k - preperiod) % period];
}

std::optional<Orbit> orbit(const Params& p, const Rational& x, std::optional<std::size_t> max_steps)
{
    const Rational start = x.frac();
    Orbit out;
    out.denominator = start.denominator();
    std::unordered_map<Integer, std::size_t, IntegerHash> seen;
    Integer a = start.numerator();
    for (std::size_t k = 0;; ++k) {
        auto [it, inserted] = seen.emplace(a, k);
        if (!inserted) {
            out.preperiod = it->second;
            out.period = k - it->second;
            return out;
        }
        if (max_steps && k >= *max_steps) {
            return std::nullopt;
        }
        out.residues.push_back(a);
        a = (a * p.r()) % out.denominator;
    }
}

Rational phi(const Rational& x)
{
    const Rational f = x.frac();
    const Rational g = Rational(1) - f;
    return f < g ? f : g;
}

Rational partial_sum(const Params& p, long n, const Rational& x)
{
    if (n < 0) {
        throw std::invalid_argument("partial_sum: n must be >= 0");
    }
    // Horner over the orbit numerators: sum_{k<n} r^-k min(a_k, q - a_k)/q.
    const Rational start = x.frac();
    const Integer q = start.denominator();
    Integer a = start.numerator();
    Integer acc = 0;
    for (long k = 0; k < n; ++k) {
        const Integer other = q - a;
        acc = acc * p.r() + (a < other ? a : other);
        a = (a * p.r()) % q;
    }
    if (n == 0) {
        return 0;
    }
    return Rational(acc, q * ipow(p.r(), static_cast<unsigned long>(n - 1)));
}

Rational eval(const Params& p, const Rational& x)
{
    const Orbit o = *orbit(p, x);
    const Integer& q = o.denominator;
    const auto term = [&](std::size_t k) {
        const Integer& a = o.residues[k];
        const Integer other = q - a;
        return a < other ? a : other;
    };
    // prefix = A/(q r^(l-1)), cycle sum B/(q r^(per-1)) repeated with ratio r^-per:
    // f = r (A (r^per - 1) + B) / (q r^l (r^per - 1)).
    Integer prefix = 0;
    for (std::size_t k = 0; k < o.preperiod; ++k) {
        prefix = prefix * p.r() + term(k);
    }
    Integer cycle = 0;
    for (std::size_t k = o.preperiod; k < o.preperiod + o.period; ++k) {
        cycle = cycle * p.r() + term(k);
    }
    const Integer rp = ipow(p.r(), o.period);
    const Integer num = p.r() * (prefix * (rp - 1) + cycle);
    const Integer den = q * ipow(p.r(), o.preperiod) * (rp - 1);
    return Rational(num, den);
}

int phi_plus(const Params& p, long k, const Rational& x)
{
    const Rational y = (Rational(ipow(p.r(), static_cast<unsigned long>(k))) * x).frac();
    return y < Rational(1, 2) ? 1 : -1;
}

std::optional<long> corner_level(const Params& p, const Rational& x, long max_level)
{
    require_unit_interval(x, "corner_level");
    const Integer q = x.denominator();
    Integer a = x.numerator();
    for (long k = 0; k <= max_level; ++k) {
        if (a == 0 || 2 * a == q) {
            return k;
        }
        a = (a * p.r()) % q;
    }
    return std::nullopt;
}

SlopeProfile slope_profile(const Params& p, const Rational& x, long depth)
{
    check_depth(depth);
    require_unit_interval(x, "slope_profile");
    SlopeProfile out{x, depth, {}};
    out.slopes.reserve(static_cast<std::size_t>(depth) + 1);
    out.slopes.push_back(0);
    const Integer q = x.denominator();
    Integer a = x.numerator();
    for (long k = 0; k <= depth; ++k) {
        if (a == 0 || 2 * a == q) {
            throw PointInCorner("x = " + x.to_string() + " is a corner point j/2r^" + std::to_string(k));
        }
        if (k < depth) {
            out.slopes.push_back(out.slopes.back() + (2 * a < q ? 1 : -1));
        }
        a = (a * p.r()) % q;
    }
    return out;
}

long interval_slope(const Params& p, const IntervalAddress& a)
{
    if (!is_valid(p, a)) {
        throw std::invalid_argument("invalid interval address");
    }
    // phi_k^+ on I_{n,j} is +1 iff floor(j / r^(n-1-k)) is even.
    long s = 0;
    Integer digits = a.j;
    for (long t = 0; t < a.n; ++t) {
        s += mpz_even_p(digits.get_mpz_t()) ? 1 : -1;
        mpz_fdiv_q_ui(digits.get_mpz_t(), digits.get_mpz_t(), static_cast<unsigned long>(p.r()));
    }
    return s;
}

IntervalAddress locate(const Params& p, long n, const Rational& x)
{
    require_unit_interval(x, "locate");
    if (n < 0) {
        throw std::invalid_argument("locate: depth must be >= 0");
    }
    if (n == 0) {
        return {0, 0};
    }
    return {n, (Rational(grid_denominator(p, n)) * x).floor()};
}

std::vector<ChordSlope> chord_slopes(const Params& p, const Rational& x, long depth)
{
    check_depth(depth);
    require_unit_interval(x, "chord_slopes");
    std::vector<ChordSlope> out;
    out.reserve(static_cast<std::size_t>(depth) + 1);
    long prefix = 0;
    Integer scale = 2; // 2r^n
    for (long n = 0; n <= depth; ++n) {
        ChordSlope c;
        c.n = n;
        c.j = (Rational(scale) * x).floor();
        c.u = Rational(c.j, scale);
        c.v = Rational(c.j + 1, scale);
        c.slope = (eval(p, c.v) - eval(p, c.u)) / (c.v - c.u);
        c.prefix = prefix;
        c.residual = c.slope - Rational(prefix);
        out.push_back(std::move(c));
        prefix += phi_plus(p, n, x);
        scale *= p.r();
    }
    return out;
}

} // namespace takagi

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "takagi/rational.hpp"

namespace takagi {

inline constexpr int kDefaultDepth = 40;
inline constexpr int kMaxDepth = 10000;

/// Throws DepthCap when depth is negative or above kMaxDepth.
void check_depth(long depth);

/// Family index r >= 2 of f_r(x) = sum_n r^-n phi(r^n x).
class Params {
public:
    explicit Params(long r);
    long r() const { return r_; }
    bool even() const { return r_ % 2 == 0; }

private:
    long r_;
};

/// Names I_{n,j} = [j/2r^(n-1), (j+1)/2r^(n-1)). Depth n = 0 denotes [0,1)
/// with j = 0, on which f_r^0 is identically zero.
struct IntervalAddress {
    long n = 0;
    Integer j = 0;

    friend bool operator==(const IntervalAddress&, const IntervalAddress&) = default;
};

/// Number of intervals at depth n: 2r^(n-1), or 1 for n = 0.
Integer interval_count(const Params& p, long n);
/// Denominator 2r^(n-1) of the depth-n grid (1 for n = 0).
Integer grid_denominator(const Params& p, long n);
bool is_valid(const Params& p, const IntervalAddress& a);
Rational left_endpoint(const Params& p, const IntervalAddress& a);
Rational right_endpoint(const Params& p, const IntervalAddress& a);
Rational width(const Params& p, long n);
/// (n+1, rj+i) for i = 0..r-1. For n = 0 the children are the two halves.
std::vector<IntervalAddress> children(const Params& p, const IntervalAddress& a);
/// True when x lies in the half-open interval.
bool contains(const Params& p, const IntervalAddress& a, const Rational& x);

/// Partial-sum slopes s_0..s_N at a point; s_0 = 0 and |s_{k+1} - s_k| = 1.
struct SlopeProfile {
    Rational point;
    long depth = 0;
    std::vector<long> slopes;

    /// Indices n >= 1 with s_n == 0, in increasing order.
    std::vector<long> zero_times() const;
};

/// Chord slope over [u_n, v_n] = [j_n/2r^n, (j_n+1)/2r^n] containing x.
struct ChordSlope {
    long n = 0;
    Integer j;
    Rational u;
    Rational v;
    Rational slope;
    /// sum_{k<n} phi_k^+(x).
    long prefix = 0;
    /// slope - prefix: phi_n^+(x) for even r, +-r/(r-1) for odd r.
    Rational residual;
};

/// Eventually periodic orbit of x_k = frac(r^k x), stored as numerators over
/// the reduced denominator of x.
struct Orbit {
    Integer denominator;
    std::vector<Integer> residues;
    std::size_t preperiod = 0;
    std::size_t period = 0;

    /// Numerator of frac(r^k x) for any k >= 0.
    const Integer& at(std::size_t k) const;
    /// +1 when frac(r^k x) < 1/2, else -1.
    int increment(std::size_t k) const { return 2 * at(k) < denominator ? 1 : -1; }
};

/// Computes the orbit of frac(x). When max_steps is given and the orbit has
/// not closed within that many distinct points, returns nullopt.
std::optional<Orbit> orbit(const Params& p, const Rational& x,
                           std::optional<std::size_t> max_steps = std::nullopt);

/// Distance to the nearest integer.
Rational phi(const Rational& x);

/// f_r^n(x) = sum_{k<n} r^-k phi(r^k x).
Rational partial_sum(const Params& p, long n, const Rational& x);

/// Exact f_r(x) for rational x. Arguments are reduced mod 1. Cost is
/// proportional to preperiod + period of the orbit of x under multiplication
/// by r, which is at most the denominator of x.
Rational eval(const Params& p, const Rational& x);

/// Right derivative of r^-k phi(r^k x): +1 when frac(r^k x) < 1/2.
int phi_plus(const Params& p, long k, const Rational& x);

/// Smallest n <= max_level with x = j/2r^n, if any. x must be in [0,1).
std::optional<long> corner_level(const Params& p, const Rational& x, long max_level);

/// s_0..s_depth at x. Throws PointInCorner when x = j/2r^n for n <= depth and
/// OutOfRange when x is outside [0,1).
SlopeProfile slope_profile(const Params& p, const Rational& x, long depth);

/// Slope of f_r^n on I_{n,j}.
long interval_slope(const Params& p, const IntervalAddress& a);

/// The depth-n interval containing x in [0,1).
IntervalAddress locate(const Params& p, long n, const Rational& x);

/// Chord slopes m_0..m_depth at x in [0,1), via exact eval at the chord ends.
std::vector<ChordSlope> chord_slopes(const Params& p, const Rational& x, long depth);

} // namespace takagi

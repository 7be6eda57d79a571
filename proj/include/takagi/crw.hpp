#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "takagi/exact.hpp"

namespace takagi {

/// Persistence p_r of the slope walk: 1/2 for even r, (r+1)/2r for odd r.
Rational crw_parameter(long r);

/// Cap on the number of depth-n parent blocks (2r^(n-1)) visited when counting.
inline constexpr long kTransitionCountCap = 10'000'000;

/// Among the 2r^n intervals at depth n+1, the fraction with phi_n^+ = +1
/// among those with phi_(n-1)^+ = +1, found by counting. n >= 1.
Rational exact_transition_count(const Params& p, long n);

enum class WalkConstraint { None, NonnegUpTo, PositiveUpTo };

const char* constraint_name(WalkConstraint c);

/// Distribution of (S_n, X_n) for the symmetric correlated random walk with
/// persistence p, P(X_1 = 1) = 1/2 (or p under a flying start, i.e. X_0 = +1).
/// Constraints apply to S_1..S_(n-1); violating paths carry no mass.
struct CrwDistribution {
    Rational p;
    long n = 0;
    WalkConstraint constraint = WalkConstraint::None;
    bool flying_start = false;
    /// (position, last step) -> probability; zero entries omitted.
    std::map<std::pair<long, int>, Rational> table;

    Rational total() const;
    /// P(S_n = s), summed over the last step.
    Rational at(long s) const;
};

inline constexpr long kMaxDpSteps = 10'000;

CrwDistribution crw_dp(const Rational& p, long n, WalkConstraint constraint, bool flying_start = false);

/// a_n = P(S_1..S_(n-1) >= 0, S_n = 0), b_n = P(S_1..S_(n-1) > 0, S_n = 0).
struct AbSequences {
    Rational p;
    /// a[k] and b[k] hold a_(k+1) and b_(k+1).
    std::vector<Rational> a;
    std::vector<Rational> b;

    const Rational& a_at(long n) const { return a.at(static_cast<std::size_t>(n - 1)); }
    const Rational& b_at(long n) const { return b.at(static_cast<std::size_t>(n - 1)); }
};

inline constexpr long kMaxAbTerms = 1000;

AbSequences a_b_sequences(const Rational& p, long max_n);

/// CSV "n,a_n,b_n,b_(n+2)/a_n"; the ratio column is empty when a_n = 0 or
/// b_(n+2) is beyond the table.
std::string to_csv(const AbSequences& ab);

/// Cap on r^n for slope_measure_check.
inline constexpr long kSlopeMeasureCap = 10'000'000;

struct SlopeMeasure {
    /// Lebesgue measure of {s_1 >= 0, ..., s_(n-1) >= 0, s_n = 0}, by counting
    /// depth-n intervals.
    Rational counted;
    /// a_n from the dynamic program.
    Rational dp;

    bool agrees() const { return counted == dp; }
};

SlopeMeasure slope_measure_check(const Params& p, long n);

/// Empirical a_n is recorded for n up to this many steps.
inline constexpr long kSimulatedATerms = 20;

struct SimulationSummary {
    std::uint64_t seed = 0;
    Rational p;
    long steps = 0;
    long paths = 0;
    /// Steps k >= 2 with X_k = X_(k-1), and all steps k >= 2.
    std::uint64_t repeats = 0;
    std::uint64_t transitions = 0;
    /// Paths with S_k = 0 for some k >= 2.
    long hit_zero = 0;
    std::uint64_t zeros = 0;
    /// Paths counted towards a_n for n = 1..min(steps, kSimulatedATerms).
    std::vector<long> a_counts;

    double transition_frequency() const;
    double hit_zero_fraction() const;
    double mean_zeros() const;
    double a_estimate(long n) const;
};

/// Paths use Stream(seed, path index), so the summary is independent of the
/// thread schedule. p must have a denominator below 2^64.
SimulationSummary simulate(const Rational& p, long steps, long paths, std::uint64_t seed);

/// Structured text; echoes the seed and stream version.
std::string to_text(const SimulationSummary& s);

} // namespace takagi

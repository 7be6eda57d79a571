#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "takagi/exact.hpp"

namespace takagi {

/// Certified enclosure lo <= M_r <= hi of M_r = max f_r over [0,1].
struct MaxEnclosure {
    Rational lo;
    Rational hi;
    /// A point where f_r attains lo.
    Rational witness;
    /// For odd r: the value f_r(1/2) = r/(2(r-1)), reported when it lies in
    /// the enclosure and the enclosure is tight.
    std::optional<Rational> exact;
    long depth = 0;
    std::size_t frontier = 0;

    Rational width() const { return hi - lo; }
};

/// Branch and bound over the depth-n grid intervals, using
/// f_r <= max(f_r^n at the endpoints) + r^-n M_r on each closed interval.
/// Stops once hi - lo <= 2^-precision_bits (precision_bits <= 60). The work
/// grows like 2^(precision_bits/2) for even r, whose maximizers form a Cantor
/// set; for odd r the maximizer 1/2 is unique and the search stays small.
MaxEnclosure max_value(const Params& p, int precision_bits);

inline constexpr int kCertifiedMaxPrecision = 30;

/// Cached max_value(p, kCertifiedMaxPrecision); thread safe.
const MaxEnclosure& certified_max(const Params& p);

/// Upper bound on M_r used for every value range: the exact value for odd r,
/// otherwise the certified enclosure's hi.
Rational max_upper_bound(const Params& p);

/// A flat interval (s_{n,j} = 0) with its exact image range under f_r.
struct FlatRecord {
    IntervalAddress address;
    /// Constant value of f_r^n on the interval.
    Rational base;
    Rational range_lo;
    Rational range_hi;

    friend bool operator==(const FlatRecord&, const FlatRecord&) = default;
};

/// Cap on r^N for exhaustive enumerations.
inline constexpr long kEnumerationCap = 10'000'000;

/// All of A+ with n <= max_depth: flat intervals whose partial-sum slopes are
/// nonnegative for k = 1..n. Sorted by (n, j). Throws DepthCap when r^N
/// exceeds kEnumerationCap.
std::vector<FlatRecord> enumerate_aplus(const Params& p, long max_depth);

/// A+(y) restricted to n <= max_depth: members whose range contains y
/// (endpoints included). Uses a search pruned by value ranges, so it reaches
/// depths where full enumeration is infeasible. Sorted by (n, j).
std::vector<FlatRecord> aplus_at(const Params& p, const Rational& y, long max_depth);

struct CoverInterval {
    IntervalAddress address;
    Rational range_lo;
    Rational range_hi;
};

/// Disjoint depth-N intervals whose union contains L_r(y). Sorted by j.
struct LevelSetCover {
    Rational y;
    long depth = 0;
    std::vector<CoverInterval> intervals;

    /// Maximal runs of adjacent intervals.
    std::size_t clusters() const;
};

inline constexpr long kMaxCoverDepth = 60;
inline constexpr std::size_t kMaxCoverFrontier = 20'000'000;

/// Breadth-first refinement keeping each interval whose range
/// [min f_r^n on the closure, max f_r^n on the closure + r^-n M_r] contains y.
LevelSetCover cover(const Params& p, const Rational& y, long depth);

/// Interval and cluster counts of the cover at every depth 1..N.
struct CoverTrace {
    std::vector<std::size_t> intervals;
    std::vector<std::size_t> clusters;
};
CoverTrace cover_trace(const Params& p, const Rational& y, long depth);

/// r-adic bisection between a and b where f_r - y changes sign (or vanishes)
/// at the ends. Returns the final point; nullopt if no sign change brackets y.
std::optional<Rational> find_level_point(const Params& p, const Rational& y, Rational a, Rational b, int steps);

struct ScanOptions {
    long samples = 200;
    long depth = 30;
    /// Depth compared against `depth` for cover stabilization.
    long compare_depth = 20;
    long levels = 3;
    long slope_depth = 200;
    std::uint64_t seed = 0;
};

struct LevelSample {
    Rational y;
    std::size_t aplus_count = 0;
    std::size_t aplus_count_at_compare = 0;
    CoverTrace trace;
    /// Cluster count at `depth` does not exceed the one at `compare_depth`.
    bool stable = false;
};

struct AbscissaSample {
    Rational x;
    bool found = false;
    std::vector<long> zero_times;
    Integer certified;
};

struct ScanReport {
    ScanOptions options;
    std::vector<LevelSample> level_samples;
    std::vector<AbscissaSample> abscissa_samples;

    double stable_fraction() const;
    double certified_fraction() const;
    /// Median cluster count of the y-experiment at each depth 1..N.
    std::vector<double> median_clusters() const;
};

/// Denominator of the abscissa grid in the x-experiment (prime, so grid
/// points are never corners for r < 65521).
inline constexpr std::uint64_t kScanGrid = 65521;

/// (a) uniform y in [0, M_r]: |A+(y)| and cover sizes by depth; (b) uniform x
/// on the k/kScanGrid grid: witness-tree certificates at y = f_r(x).
ScanReport finiteness_scan(const Params& p, const ScanOptions& options);

struct MonteCarloMode {
    long samples = 0;
    std::uint64_t seed = 0;
};
struct ExactDepthMode {
    long depth = 0;
};
using OccupationMode = std::variant<MonteCarloMode, ExactDepthMode>;

/// Pushforward of Lebesgue measure on [0,1) through f_r, binned on [0, hi]
/// where hi = max_upper_bound(r).
struct OccupationHistogram {
    long bins = 0;
    Rational range_hi;
    std::vector<double> masses;
    long samples = 0;
    bool exact = false;
    std::optional<std::uint64_t> seed;
    /// Bound on |f_r - value used for binning|: r^-N M_r for exact depth N,
    /// the series truncation for Monte Carlo at odd r, zero otherwise.
    Rational smear;

    double total_mass() const;
    /// Smallest fraction of bins whose combined mass reaches `level`.
    double concentration(double level = 0.9) const;
};

OccupationHistogram occupation_histogram(const Params& p, long bins, const OccupationMode& mode);

struct HeightWidthEntry {
    IntervalAddress address;
    Rational range_width;
    Rational interval_width;
    bool passed = false;
};

struct HeightWidthReport {
    std::vector<HeightWidthEntry> entries;
    /// Sum of interval widths over all records.
    Rational total_width;
    /// p_r^-2.
    Rational bound;

    bool passed() const;
};

/// Checks that each flat range is no taller than its interval is wide and
/// that the summed interval widths stay below p_r^-2.
HeightWidthReport heightwidth_check(const Params& p, const std::vector<FlatRecord>& records);

/// CSV rows "n,j,left,right,range_lo,range_hi" with header.
std::string to_csv(const Params& p, const LevelSetCover& c);
std::string to_csv(const Params& p, const std::vector<FlatRecord>& records);
std::string to_csv(const OccupationHistogram& h);

} // namespace takagi

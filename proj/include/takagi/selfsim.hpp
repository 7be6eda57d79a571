#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "takagi/exact.hpp"

namespace takagi {

/// One of the r scaled copies of the half graph over [0, 1/2] sitting above a
/// flat interval I_{n,j} (slope of f_r^n equal to zero).
///
/// On the closed child interval I_{n+1, rj+i}, with x = (rj+i)/2r^n + x'/r^n:
///     f_r(x) - offset = scale * f_r(x')        if rj+i is even,
///     f_r(x) - offset = scale * f_r(1/2 - x')  if rj+i is odd,
/// and the same identity holds for every partial sum f_r^m, m > n, with
/// f_r^(m-n) on the right.
struct AffineCopy {
    IntervalAddress parent;
    long child_index = 0;
    IntervalAddress child;
    Rational offset;
    Rational scale;
    bool reflected = false;

    /// x' in [0, 1/2] for x in the closed child interval.
    Rational to_local(const Params& p, const Rational& x) const;
    /// Inverse of to_local.
    Rational from_local(const Params& p, const Rational& local) const;
    /// The argument of f_r on the right-hand side: x' or 1/2 - x'.
    Rational source_point(const Params& p, const Rational& x) const;
};

/// Throws NotFlat unless interval_slope(a) == 0.
std::vector<AffineCopy> decompose(const Params& p, const IntervalAddress& a);

struct ChildCheck {
    long child_index = 0;
    bool reflected = false;
    long samples = 0;
    /// Samples where the partial-sum identity held exactly at depth m.
    long partial_ok = 0;
    /// Samples where the limit identity (exact eval on both sides) held.
    long limit_ok = 0;

    bool passed() const { return partial_ok == samples && limit_ok == samples; }
};

struct SelfSimReport {
    IntervalAddress address;
    long m = 0;
    std::vector<ChildCheck> children;

    bool passed() const;
};

/// Checks the self-similarity identities on every child of a flat interval at
/// both closed endpoints plus random rational interior points.
SelfSimReport verify_selfsim(const Params& p, const IntervalAddress& a, long m, long samples,
                             std::uint64_t seed = 0);

struct WitnessNode {
    /// Letters in 1..r; letter i+1 selects the i-th child left to right.
    std::vector<int> word;
    IntervalAddress interval;
    /// Image of the base point under the composed copy maps; lies on the
    /// level set of the base point.
    Rational representative;
};

/// Finite r-ary tree of flat intervals certifying r^K points of one level set.
struct WitnessTree {
    Rational base;
    std::vector<long> zero_times;
    /// y_k = f_r^(n_k)(base).
    std::vector<Rational> levels;
    /// nodes[k] holds the r^k level-k nodes in left-to-right order.
    std::vector<std::vector<WitnessNode>> nodes;

    long height() const { return static_cast<long>(zero_times.size()) - 1; }
    const std::vector<WitnessNode>& leaves() const { return nodes.back(); }
};

/// Builds the tree from the first K+1 zero times of the slope walk at x found
/// within search_depth. Throws NotEnoughZeros, PointInCorner, DepthCap.
WitnessTree witness_tree(const Params& p, const Rational& x, long levels, long search_depth);

/// Outcome of checking the five structural properties of a witness tree.
struct WitnessCheck {
    bool root_is_base_interval = true;
    bool levels_disjoint = true;
    bool constant_on_nodes = true;
    bool nodes_are_grid_intervals = true;
    bool children_nested = true;

    bool passed() const
    {
        return root_is_base_interval && levels_disjoint && constant_on_nodes && nodes_are_grid_intervals &&
               children_nested;
    }
};

WitnessCheck check_witness_tree(const Params& p, const WitnessTree& tree);

struct LevelCertificate {
    Rational y;
    Rational leaf_level;
    /// Upper end y_K + r^-n_K * M_r of every leaf's value range.
    Rational leaf_top;
    bool strict = false;
    Integer count;
    std::string justification;
};

/// Certified lower bound on |L_r(y)| for y = f_r(tree.base).
LevelCertificate level_count_certificate(const Params& p, const WitnessTree& tree, const Rational& y);
LevelCertificate level_count_certificate(const Params& p, const WitnessTree& tree);

/// Text form: zero times, one "y_k = p/q" line per level, leaf addresses.
std::string to_text(const WitnessTree& tree);

} // namespace takagi

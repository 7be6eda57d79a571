#include "takagi/selfsim.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "takagi/errors.hpp"
#include "takagi/levelset.hpp"
#include "takagi/random.hpp"

namespace takagi {

namespace {

constexpr long kMaxWitnessLeaves = 1L << 20;

Rational r_power(const Params& p, long n) { return Rational(ipow(p.r(), static_cast<unsigned long>(n))); }

} // namespace

Rational AffineCopy::to_local(const Params& p, const Rational& x) const
{
    return r_power(p, parent.n) * x - Rational(child.j, Integer(2));
}

Rational AffineCopy::from_local(const Params& p, const Rational& local) const
{
    return (Rational(child.j, Integer(2)) + local) / r_power(p, parent.n);
}

Rational AffineCopy::source_point(const Params& p, const Rational& x) const
{
    const Rational local = to_local(p, x);
    return reflected ? Rational(1, 2) - local : local;
}

std::vector<AffineCopy> decompose(const Params& p, const IntervalAddress& a)
{
    if (!is_valid(p, a) || a.n < 1) {
        throw std::invalid_argument("decompose: needs a valid address with n >= 1");
    }
    if (const long s = interval_slope(p, a); s != 0) {
        throw NotFlat("interval (" + std::to_string(a.n) + "," + a.j.get_str() + ") has slope " +
                      std::to_string(s));
    }
    const Rational offset = partial_sum(p, a.n, left_endpoint(p, a));
    const Rational scale = inverse_power(p.r(), static_cast<unsigned long>(a.n));
    std::vector<AffineCopy> out;
    out.reserve(static_cast<std::size_t>(p.r()));
    for (long i = 0; i < p.r(); ++i) {
        AffineCopy c;
        c.parent = a;
        c.child_index = i;
        c.child = {a.n + 1, a.j * p.r() + i};
        c.offset = offset;
        c.scale = scale;
        c.reflected = mpz_odd_p(c.child.j.get_mpz_t()) != 0;
        out.push_back(std::move(c));
    }
    return out;
}

bool SelfSimReport::passed() const
{
    for (const auto& c : children) {
        if (!c.passed()) {
            return false;
        }
    }
    return !children.empty();
}

SelfSimReport verify_selfsim(const Params& p, const IntervalAddress& a, long m, long samples, std::uint64_t seed)
{
    if (m <= a.n) {
        throw std::invalid_argument("verify_selfsim: m must exceed n");
    }
    SelfSimReport report{a, m, {}};
    for (const AffineCopy& copy : decompose(p, a)) {
        Stream rng(seed, static_cast<std::uint64_t>(copy.child_index));
        ChildCheck check;
        check.child_index = copy.child_index;
        check.reflected = copy.reflected;
        for (long s = 0; s < samples; ++s) {
            Rational local;
            if (s == 0) {
                local = 0;
            } else if (s == 1) {
                local = Rational(1, 2);
            } else {
                const auto q = static_cast<long>(2 + rng.below(96));
                local = Rational(Integer(static_cast<long>(rng.below(static_cast<std::uint64_t>(q) + 1))),
                                 Integer(2 * q));
            }
            const Rational x = copy.from_local(p, local);
            const Rational source = copy.source_point(p, x);
            ++check.samples;
            if (partial_sum(p, m, x) - copy.offset == copy.scale * partial_sum(p, m - a.n, source)) {
                ++check.partial_ok;
            }
            if (eval(p, x) - copy.offset == copy.scale * eval(p, source)) {
                ++check.limit_ok;
            }
        }
        report.children.push_back(check);
    }
    return report;
}

WitnessTree witness_tree(const Params& p, const Rational& x, long levels, long search_depth)
{
    if (levels < 0) {
        throw std::invalid_argument("witness_tree: levels must be >= 0");
    }
    const Integer leaves = ipow(p.r(), static_cast<unsigned long>(levels));
    if (leaves > kMaxWitnessLeaves) {
        throw DepthCap("witness tree with " + leaves.get_str() + " leaves exceeds the cap");
    }
    const SlopeProfile profile = slope_profile(p, x, search_depth);
    const std::vector<long> zeros = profile.zero_times();
    if (static_cast<long>(zeros.size()) < levels + 1) {
        throw NotEnoughZeros("found " + std::to_string(zeros.size()) + " zero times within depth " +
                             std::to_string(search_depth) + ", need " + std::to_string(levels + 1));
    }

    WitnessTree tree;
    tree.base = x;
    tree.zero_times.assign(zeros.begin(), zeros.begin() + levels + 1);
    for (long n : tree.zero_times) {
        tree.levels.push_back(partial_sum(p, n, x));
    }
    tree.nodes.push_back({WitnessNode{{}, locate(p, tree.zero_times[0], x), x}});

    for (long k = 0; k < levels; ++k) {
        const long n = tree.zero_times[static_cast<std::size_t>(k)];
        const long next = tree.zero_times[static_cast<std::size_t>(k) + 1];
        const Rational rn = r_power(p, n);
        std::vector<WitnessNode> level;
        level.reserve(tree.nodes.back().size() * static_cast<std::size_t>(p.r()));
        for (const WitnessNode& node : tree.nodes.back()) {
            // Local coordinate of the representative inside its own copy.
            const Rational scaled = rn * node.representative;
            const Integer home = (Rational(2) * scaled).floor();
            Rational local = scaled - Rational(home, Integer(2));
            if (mpz_odd_p(home.get_mpz_t())) {
                local = Rational(1, 2) - local;
            }
            for (long i = 0; i < p.r(); ++i) {
                const Integer c = node.interval.j * p.r() + i;
                const Rational shift = mpz_odd_p(c.get_mpz_t()) ? Rational(1, 2) - local : local;
                const Rational z = (Rational(c, Integer(2)) + shift) / rn;
                WitnessNode child;
                child.word = node.word;
                child.word.push_back(static_cast<int>(i + 1));
                child.interval = locate(p, next, z);
                child.representative = z;
                level.push_back(std::move(child));
            }
        }
        tree.nodes.push_back(std::move(level));
    }
    return tree;
}

WitnessCheck check_witness_tree(const Params& p, const WitnessTree& tree)
{
    WitnessCheck check;
    if (tree.nodes.empty() || tree.nodes.front().size() != 1 ||
        tree.nodes.front().front().interval != locate(p, tree.zero_times.front(), tree.base)) {
        check.root_is_base_interval = false;
    }
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
        const long n = tree.zero_times[k];
        const auto& level = tree.nodes[k];
        for (std::size_t i = 0; i < level.size(); ++i) {
            const WitnessNode& node = level[i];
            if (node.interval.n != n || !is_valid(p, node.interval) || interval_slope(p, node.interval) != 0 ||
                !contains(p, node.interval, node.representative)) {
                check.nodes_are_grid_intervals = false;
            }
            if (partial_sum(p, n, left_endpoint(p, node.interval)) != tree.levels[k]) {
                check.constant_on_nodes = false;
            }
            if (i + 1 < level.size() &&
                right_endpoint(p, node.interval) > left_endpoint(p, level[i + 1].interval)) {
                check.levels_disjoint = false;
            }
            if (k > 0) {
                const WitnessNode& parent = tree.nodes[k - 1][i / static_cast<std::size_t>(p.r())];
                const bool inside = left_endpoint(p, parent.interval) <= left_endpoint(p, node.interval) &&
                                    right_endpoint(p, node.interval) <= right_endpoint(p, parent.interval);
                const bool proper = width(p, node.interval.n) < width(p, parent.interval.n);
                const bool prefix = std::equal(parent.word.begin(), parent.word.end(), node.word.begin()) &&
                                    node.word.size() == parent.word.size() + 1;
                if (!inside || !proper || !prefix) {
                    check.children_nested = false;
                }
            }
        }
    }
    return check;
}

LevelCertificate level_count_certificate(const Params& p, const WitnessTree& tree, const Rational& y)
{
    const long height = tree.height();
    const long n_last = tree.zero_times.back();
    LevelCertificate cert;
    cert.y = y;
    cert.leaf_level = tree.levels.back();
    cert.leaf_top =
        cert.leaf_level + inverse_power(p.r(), static_cast<unsigned long>(n_last)) * max_upper_bound(p);
    if (y < cert.leaf_level || y > cert.leaf_top) {
        throw std::logic_error("level_count_certificate: y = " + y.to_string() +
                               " is outside the leaf value range; tree and level disagree");
    }
    const Integer leaves = ipow(p.r(), static_cast<unsigned long>(height));
    cert.strict = y > cert.leaf_level;
    std::ostringstream why;
    if (cert.strict) {
        cert.count = leaves;
        why << leaves << " disjoint closed leaves each take the value " << cert.leaf_level
            << " at an endpoint and reach " << cert.leaf_top << " >= y inside, so each contains a point of L_r(y)";
    } else {
        cert.count = ceil_div(leaves, Integer(2));
        why << "y equals the leaf level " << cert.leaf_level
            << "; adjacent leaves may share the endpoint attaining it, so only half are counted";
    }
    cert.justification = why.str();
    return cert;
}

LevelCertificate level_count_certificate(const Params& p, const WitnessTree& tree)
{
    return level_count_certificate(p, tree, eval(p, tree.base));
}

std::string to_text(const WitnessTree& tree)
{
    std::ostringstream out;
    out << "base " << tree.base << "\n";
    out << "zero_times";
    for (long n : tree.zero_times) {
        out << " " << n;
    }
    out << "\n";
    for (std::size_t k = 0; k < tree.levels.size(); ++k) {
        out << "y_" << k << " = " << tree.levels[k] << "\n";
    }
    out << "leaves " << tree.leaves().size() << "\n";
    for (const WitnessNode& leaf : tree.leaves()) {
        out << "(" << leaf.interval.n << "," << leaf.interval.j.get_str() << ")\n";
    }
    return out.str();
}

} // namespace takagi

#include "takagi/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "takagi/crw.hpp"
#include "takagi/errors.hpp"
#include "takagi/random.hpp"
#include "takagi/selfsim.hpp"

namespace takagi {

namespace {

// A depth-n grid interval with f_r^n at its left endpoint stored as an
// integer numerator over grid_denominator(n); the right value is left + slope.
struct GridNode {
    long n = 0;
    Integer j = 0;
    Integer left = 0;
    long slope = 0;
    Integer right_cache = 0;
};

GridNode make_node(long n, Integer j, Integer left, long slope)
{
    GridNode g;
    g.n = n;
    g.j = std::move(j);
    g.left = std::move(left);
    g.slope = slope;
    g.right_cache = g.left + slope;
    return g;
}

GridNode root_node() { return make_node(0, 0, 0, 0); }

template <typename Fn>
void for_each_child(const Params& p, const GridNode& node, Fn&& fn)
{
    if (node.n == 0) {
        fn(make_node(1, 0, 0, 1));
        fn(make_node(1, 1, 1, -1));
        return;
    }
    for (long i = 0; i < p.r(); ++i) {
        Integer c = node.j * p.r() + i;
        const bool odd = mpz_odd_p(c.get_mpz_t()) != 0;
        Integer left = node.left * p.r() + node.slope * i + (odd ? 1 : 0);
        fn(make_node(node.n + 1, std::move(c), std::move(left), node.slope + (odd ? -1 : 1)));
    }
}

const Integer& node_min(const GridNode& g) { return g.slope >= 0 ? g.left : g.right_cache; }
const Integer& node_max(const GridNode& g) { return g.slope >= 0 ? g.right_cache : g.left; }

// Integer thresholds deciding lo <= y <= hi for depth-n nodes, where
// lo = min/D and hi = max/D + r^-n M = (max + 2M/r)/D.
struct LevelTest {
    Integer min_ceiling; // keep iff min <= min_ceiling
    Integer max_floor;   // keep iff max >= max_floor

    bool keep(const GridNode& g) const { return node_min(g) <= min_ceiling && node_max(g) >= max_floor; }
};

LevelTest level_test(const Params& p, const Rational& y, long n, const Rational& m_upper)
{
    const Rational yd = y * Rational(grid_denominator(p, n));
    const Rational slack = Rational(2) * m_upper / Rational(p.r());
    LevelTest t;
    t.min_ceiling = yd.floor();
    t.max_floor = ceil_div((yd - slack).numerator(), (yd - slack).denominator());
    return t;
}

Rational node_value(const Params& p, const GridNode& g, const Integer& numerator)
{
    return Rational(numerator, grid_denominator(p, g.n));
}

FlatRecord flat_record(const Params& p, const GridNode& g, const Rational& m_upper)
{
    FlatRecord rec;
    rec.address = {g.n, g.j};
    rec.base = node_value(p, g, g.left);
    rec.range_lo = rec.base;
    rec.range_hi = rec.base + inverse_power(p.r(), static_cast<unsigned long>(g.n)) * m_upper;
    return rec;
}

std::size_t count_clusters(const std::vector<GridNode>& level)
{
    std::size_t clusters = 0;
    for (std::size_t i = 0; i < level.size(); ++i) {
        if (i == 0 || level[i].j != level[i - 1].j + 1) {
            ++clusters;
        }
    }
    return clusters;
}

// Breadth-first refinement of the level-y cover; on_level sees each depth.
template <typename OnLevel>
std::vector<GridNode> refine_cover(const Params& p, const Rational& y, long depth, OnLevel&& on_level)
{
    if (depth < 0 || depth > kMaxCoverDepth) {
        throw DepthCap("cover depth " + std::to_string(depth) + " outside [0, " + std::to_string(kMaxCoverDepth) +
                       "]");
    }
    const Rational m_upper = max_upper_bound(p);
    std::vector<GridNode> frontier;
    if (y.sign() >= 0 && y <= m_upper) {
        frontier.push_back(root_node());
    }
    for (long n = 1; n <= depth; ++n) {
        const LevelTest test = level_test(p, y, n, m_upper);
        std::vector<GridNode> next;
        for (const GridNode& g : frontier) {
            for_each_child(p, g, [&](GridNode child) {
                if (test.keep(child)) {
                    next.push_back(std::move(child));
                }
            });
        }
        if (next.size() > kMaxCoverFrontier) {
            throw DepthCap("cover frontier exceeded " + std::to_string(kMaxCoverFrontier) + " intervals");
        }
        frontier = std::move(next);
        on_level(n, frontier);
    }
    return frontier;
}

} // namespace

MaxEnclosure max_value(const Params& p, int precision_bits)
{
    if (precision_bits < 0 || precision_bits > 60) {
        throw std::invalid_argument("max_value: precision must be in [0, 60]");
    }
    constexpr std::size_t kMaxFrontier = 1u << 26;
    const Rational target = inverse_power(2, static_cast<unsigned long>(precision_bits));

    MaxEnclosure out;
    out.witness = Rational(1, 2);
    out.lo = eval(p, out.witness);
    if (const Rational third = eval(p, Rational(1, 3)); third > out.lo) {
        out.lo = third;
        out.witness = Rational(1, 3);
    }
    out.hi = Rational(p.r(), 2 * (p.r() - 1));

    std::vector<GridNode> frontier{root_node()};
    for (long n = 1; out.hi - out.lo > target; ++n) {
        const Integer den = grid_denominator(p, n);
        const Integer rn = ipow(p.r(), static_cast<unsigned long>(n));
        // Keep a node iff max + 2H/r >= lo * D, i.e. its upper bound reaches lo.
        const Rational bar = out.lo * Rational(den) - Rational(2) * out.hi / Rational(p.r());
        const Integer threshold = ceil_div(bar.numerator(), bar.denominator());
        std::vector<GridNode> next;
        Integer best_top = 0;
        const GridNode* best = nullptr;
        for (const GridNode& g : frontier) {
            for_each_child(p, g, [&](GridNode child) {
                if (node_max(child) >= threshold) {
                    next.push_back(std::move(child));
                }
            });
        }
        for (const GridNode& g : next) {
            if (best == nullptr || node_max(g) > best_top) {
                best_top = node_max(g);
                best = &g;
            }
        }
        if (best == nullptr) {
            throw std::logic_error("max_value: frontier emptied; lower bound exceeds the true maximum");
        }
        // f_r^n at a grid point never exceeds f_r there.
        if (const Rational candidate(best_top, den); candidate > out.lo) {
            out.lo = candidate;
            out.witness = Rational(best->slope >= 0 ? best->j + 1 : best->j, den);
        }
        // M <= max(top + r^-n M) over the surviving frontier gives
        // M <= top * r^n / (D (r^n - 1)).
        const Rational fixpoint(best_top * rn, den * (rn - 1));
        if (fixpoint < out.hi) {
            out.hi = fixpoint;
        }
        out.depth = n;
        out.frontier = next.size();
        if (next.size() > kMaxFrontier) {
            throw DepthCap("max_value frontier exceeded " + std::to_string(kMaxFrontier) + " intervals");
        }
        frontier = std::move(next);
    }
    if (!p.even()) {
        const Rational candidate = eval(p, Rational(1, 2));
        if (out.lo <= candidate && candidate <= out.hi && candidate == out.lo) {
            out.exact = candidate;
        }
    }
    return out;
}

const MaxEnclosure& certified_max(const Params& p)
{
    static std::mutex mutex;
    static std::map<long, MaxEnclosure> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(p.r());
    if (it == cache.end()) {
        it = cache.emplace(p.r(), max_value(p, kCertifiedMaxPrecision)).first;
    }
    return it->second;
}

Rational max_upper_bound(const Params& p)
{
    const MaxEnclosure& m = certified_max(p);
    return m.exact ? *m.exact : m.hi;
}

std::vector<FlatRecord> enumerate_aplus(const Params& p, long max_depth)
{
    if (max_depth < 0 || ipow(p.r(), static_cast<unsigned long>(max_depth)) > kEnumerationCap) {
        throw DepthCap("r^N exceeds the enumeration cap for N = " + std::to_string(max_depth));
    }
    const Rational m_upper = max_upper_bound(p);
    std::vector<FlatRecord> out;
    std::vector<GridNode> frontier{root_node()};
    for (long n = 1; n <= max_depth; ++n) {
        std::vector<GridNode> next;
        for (const GridNode& g : frontier) {
            for_each_child(p, g, [&](GridNode child) {
                if (child.slope >= 0) {
                    next.push_back(std::move(child));
                }
            });
        }
        for (const GridNode& g : next) {
            if (g.slope == 0) {
                out.push_back(flat_record(p, g, m_upper));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::vector<FlatRecord> aplus_at(const Params& p, const Rational& y, long max_depth)
{
    if (max_depth < 0 || max_depth > kMaxCoverDepth) {
        throw DepthCap("A+(y) depth " + std::to_string(max_depth) + " outside [0, " +
                       std::to_string(kMaxCoverDepth) + "]");
    }
    const Rational m_upper = max_upper_bound(p);
    std::vector<FlatRecord> out;
    std::vector<GridNode> frontier;
    if (y.sign() >= 0 && y <= m_upper) {
        frontier.push_back(root_node());
    }
    for (long n = 1; n <= max_depth; ++n) {
        const LevelTest test = level_test(p, y, n, m_upper);
        std::vector<GridNode> next;
        for (const GridNode& g : frontier) {
            for_each_child(p, g, [&](GridNode child) {
                if (child.slope >= 0 && test.keep(child)) {
                    next.push_back(std::move(child));
                }
            });
        }
        if (next.size() > kMaxCoverFrontier) {
            throw DepthCap("A+(y) frontier exceeded " + std::to_string(kMaxCoverFrontier) + " intervals");
        }
        for (const GridNode& g : next) {
            if (g.slope == 0) {
                out.push_back(flat_record(p, g, m_upper));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::size_t LevelSetCover::clusters() const
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (i == 0 || intervals[i].address.j != intervals[i - 1].address.j + 1) {
            ++count;
        }
    }
    return count;
}

LevelSetCover cover(const Params& p, const Rational& y, long depth)
{
    const Rational m_upper = max_upper_bound(p);
    const auto final_level = refine_cover(p, y, depth, [](long, const std::vector<GridNode>&) {});
    LevelSetCover out{y, depth, {}};
    out.intervals.reserve(final_level.size());
    for (const GridNode& g : final_level) {
        CoverInterval c;
        c.address = {g.n, g.j};
        c.range_lo = node_value(p, g, node_min(g));
        c.range_hi = node_value(p, g, node_max(g)) + inverse_power(p.r(), static_cast<unsigned long>(g.n)) * m_upper;
        out.intervals.push_back(std::move(c));
    }
    return out;
}

CoverTrace cover_trace(const Params& p, const Rational& y, long depth)
{
    CoverTrace trace;
    refine_cover(p, y, depth, [&](long, const std::vector<GridNode>& level) {
        trace.intervals.push_back(level.size());
        trace.clusters.push_back(count_clusters(level));
    });
    return trace;
}

std::optional<Rational> find_level_point(const Params& p, const Rational& y, Rational a, Rational b, int steps)
{
    if (b < a) {
        std::swap(a, b);
    }
    Rational ga = eval(p, a) - y;
    Rational gb = eval(p, b) - y;
    if (ga.sign() == 0) {
        return a;
    }
    if (gb.sign() == 0) {
        return b;
    }
    if (ga.sign() == gb.sign()) {
        return std::nullopt;
    }
    for (int step = 0; step < steps; ++step) {
        const Rational h = (b - a) / Rational(p.r());
        Rational prev = a;
        Rational gprev = ga;
        for (long k = 1; k <= p.r(); ++k) {
            const Rational t = k == p.r() ? b : a + h * Rational(k);
            const Rational gt = k == p.r() ? gb : eval(p, t) - y;
            if (gt.sign() == 0) {
                return t;
            }
            if (gt.sign() != gprev.sign()) {
                a = prev;
                ga = gprev;
                b = t;
                gb = gt;
                break;
            }
            prev = t;
            gprev = gt;
        }
    }
    return ga.abs() <= gb.abs() ? a : b;
}

double ScanReport::stable_fraction() const
{
    if (level_samples.empty()) {
        return 0.0;
    }
    const auto stable = std::count_if(level_samples.begin(), level_samples.end(),
                                      [](const LevelSample& s) { return s.stable; });
    return static_cast<double>(stable) / static_cast<double>(level_samples.size());
}

double ScanReport::certified_fraction() const
{
    if (abscissa_samples.empty()) {
        return 0.0;
    }
    const auto found = std::count_if(abscissa_samples.begin(), abscissa_samples.end(),
                                     [](const AbscissaSample& s) { return s.found; });
    return static_cast<double>(found) / static_cast<double>(abscissa_samples.size());
}

std::vector<double> ScanReport::median_clusters() const
{
    std::vector<double> out;
    if (level_samples.empty()) {
        return out;
    }
    const std::size_t depths = level_samples.front().trace.clusters.size();
    for (std::size_t d = 0; d < depths; ++d) {
        std::vector<std::size_t> column;
        for (const auto& s : level_samples) {
            column.push_back(s.trace.clusters[d]);
        }
        std::sort(column.begin(), column.end());
        const std::size_t mid = column.size() / 2;
        out.push_back(column.size() % 2 == 1 ? static_cast<double>(column[mid])
                                             : 0.5 * static_cast<double>(column[mid - 1] + column[mid]));
    }
    return out;
}

ScanReport finiteness_scan(const Params& p, const ScanOptions& options)
{
    if (options.compare_depth < 1 || options.compare_depth > options.depth) {
        throw std::invalid_argument("finiteness_scan: need 1 <= compare_depth <= depth");
    }
    ScanReport report;
    report.options = options;
    const auto count = static_cast<std::size_t>(std::max(0L, options.samples));
    report.level_samples.resize(count);
    report.abscissa_samples.resize(count);
    if (count == 0) {
        return report;
    }
    const Rational m_lo = certified_max(p).lo;
    max_upper_bound(p);

    parallel_chunks(count, count, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Stream ys(options.seed, 2 * i);
            LevelSample& ls = report.level_samples[i];
            ls.y = Rational(Integer(static_cast<unsigned long>(ys.next() >> 11)), ipow(2, 53)) * m_lo;
            ls.trace = cover_trace(p, ls.y, options.depth);
            const auto& clusters = ls.trace.clusters;
            ls.stable = clusters[static_cast<std::size_t>(options.depth) - 1] <=
                        clusters[static_cast<std::size_t>(options.compare_depth) - 1];
            const auto flats = aplus_at(p, ls.y, options.depth);
            ls.aplus_count = flats.size();
            ls.aplus_count_at_compare = static_cast<std::size_t>(std::count_if(
                flats.begin(), flats.end(),
                [&](const FlatRecord& f) { return f.address.n <= options.compare_depth; }));

            Stream xs(options.seed, 2 * i + 1);
            AbscissaSample& as = report.abscissa_samples[i];
            as.x = random_grid_point(xs, p, kScanGrid, options.slope_depth);
            try {
                const WitnessTree tree = witness_tree(p, as.x, options.levels, options.slope_depth);
                as.found = true;
                as.zero_times = tree.zero_times;
                as.certified = level_count_certificate(p, tree).count;
            } catch (const NotEnoughZeros&) {
                as.found = false;
            }
        }
    });
    return report;
}

double OccupationHistogram::total_mass() const
{
    double total = 0.0;
    for (double m : masses) {
        total += m;
    }
    return total;
}

double OccupationHistogram::concentration(double level) const
{
    if (masses.empty()) {
        return 0.0;
    }
    std::vector<double> sorted = masses;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double goal = level * total_mass();
    double acc = 0.0;
    std::size_t used = 0;
    for (double m : sorted) {
        if (acc >= goal) {
            break;
        }
        acc += m;
        ++used;
    }
    return static_cast<double>(used) / static_cast<double>(masses.size());
}

namespace {

constexpr std::size_t kOccupationChunk = 1u << 14;

OccupationHistogram occupation_monte_carlo(const Params& p, long bins, const MonteCarloMode& mode)
{
    OccupationHistogram h;
    h.bins = bins;
    h.range_hi = max_upper_bound(p);
    h.samples = mode.samples;
    h.seed = mode.seed;
    h.masses.assign(static_cast<std::size_t>(bins), 0.0);
    // Even r: r^64 x is an integer for x = k/2^64, so 64 terms are exact.
    long terms = 64;
    if (!p.even()) {
        terms = static_cast<long>(std::ceil(64.0 / std::log2(static_cast<double>(p.r())))) + 1;
        h.smear = inverse_power(p.r(), static_cast<unsigned long>(terms)) * h.range_hi;
    }
    if (mode.samples <= 0) {
        h.masses.clear();
        h.masses.assign(static_cast<std::size_t>(bins), 0.0);
        return h;
    }
    // y = acc / (2^64 r^(terms-1)); bin = floor(y * bins / hi).
    const Integer denom = ipow(2, 64) * ipow(p.r(), static_cast<unsigned long>(terms - 1)) * h.range_hi.numerator();
    const Integer scale = Integer(bins) * h.range_hi.denominator();
    const auto total = static_cast<std::size_t>(mode.samples);
    const std::size_t chunks = (total + kOccupationChunk - 1) / kOccupationChunk;
    std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(static_cast<std::size_t>(bins)));
    const auto r = static_cast<std::uint64_t>(p.r());
    parallel_chunks(chunks, chunks, [&](std::size_t chunk, std::size_t, std::size_t) {
        Stream s(mode.seed, chunk);
        const std::size_t begin = chunk * kOccupationChunk;
        const std::size_t end = std::min(total, begin + kOccupationChunk);
        Integer acc;
        Integer bin;
        auto& local = counts[chunk];
        for (std::size_t i = begin; i < end; ++i) {
            std::uint64_t t = s.next();
            acc = 0;
            for (long k = 0; k < terms; ++k) {
                const std::uint64_t c = t <= (1ULL << 63) ? t : (0 - t);
                acc *= static_cast<unsigned long>(r);
                acc += static_cast<unsigned long>(c);
                t *= r;
            }
            acc *= scale;
            mpz_fdiv_q(bin.get_mpz_t(), acc.get_mpz_t(), denom.get_mpz_t());
            const unsigned long b = bin.get_ui();
            ++local[std::min<unsigned long>(b, static_cast<unsigned long>(bins - 1))];
        }
    });
    std::vector<std::uint64_t> merged(static_cast<std::size_t>(bins), 0);
    for (const auto& c : counts) {
        for (std::size_t b = 0; b < c.size(); ++b) {
            merged[b] += c[b];
        }
    }
    for (std::size_t b = 0; b < merged.size(); ++b) {
        h.masses[b] = static_cast<double>(merged[b]) / static_cast<double>(total);
    }
    return h;
}

OccupationHistogram occupation_exact(const Params& p, long bins, const ExactDepthMode& mode)
{
    if (mode.depth < 1 || interval_count(p, mode.depth) > kEnumerationCap) {
        throw DepthCap("exact occupation needs 1 <= N with 2r^(N-1) <= " + std::to_string(kEnumerationCap));
    }
    OccupationHistogram h;
    h.bins = bins;
    h.range_hi = max_upper_bound(p);
    h.exact = true;
    h.smear = inverse_power(p.r(), static_cast<unsigned long>(mode.depth)) * h.range_hi;
    h.masses.assign(static_cast<std::size_t>(bins), 0.0);
    const double hi = h.range_hi.to_double();
    const double bin_width = hi / static_cast<double>(bins);
    const double den = grid_denominator(p, mode.depth).get_d();
    const double piece = 1.0 / den;
    const auto bin_of = [&](double v) {
        const auto b = static_cast<long>(std::floor(v / bin_width));
        return static_cast<std::size_t>(std::clamp(b, 0L, bins - 1));
    };

    std::vector<GridNode> stack{root_node()};
    while (!stack.empty()) {
        GridNode g = std::move(stack.back());
        stack.pop_back();
        if (g.n == mode.depth) {
            const double a = g.left.get_d() / den;
            const double b = g.right_cache.get_d() / den;
            if (g.slope == 0) {
                h.masses[bin_of(a)] += piece;
                continue;
            }
            // Linear piece: image [lo, hi] carries mass uniformly.
            const double lo = std::min(a, b);
            const double top = std::max(a, b);
            const std::size_t first = bin_of(lo);
            const std::size_t last = bin_of(top);
            for (std::size_t k = first; k <= last; ++k) {
                const double edge_lo = std::max(lo, static_cast<double>(k) * bin_width);
                const double edge_hi = k == last ? top : std::min(top, static_cast<double>(k + 1) * bin_width);
                if (edge_hi > edge_lo) {
                    h.masses[k] += piece * (edge_hi - edge_lo) / (top - lo);
                }
            }
            continue;
        }
        std::vector<GridNode> kids;
        for_each_child(p, g, [&](GridNode child) { kids.push_back(std::move(child)); });
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            stack.push_back(std::move(*it));
        }
    }
    return h;
}

} // namespace

OccupationHistogram occupation_histogram(const Params& p, long bins, const OccupationMode& mode)
{
    if (bins < 1) {
        throw std::invalid_argument("occupation_histogram: bins must be >= 1");
    }
    if (const auto* mc = std::get_if<MonteCarloMode>(&mode)) {
        return occupation_monte_carlo(p, bins, *mc);
    }
    return occupation_exact(p, bins, std::get<ExactDepthMode>(mode));
}

bool HeightWidthReport::passed() const
{
    return std::all_of(entries.begin(), entries.end(), [](const HeightWidthEntry& e) { return e.passed; }) &&
           total_width <= bound;
}

HeightWidthReport heightwidth_check(const Params& p, const std::vector<FlatRecord>& records)
{
    HeightWidthReport report;
    const Rational pr = crw_parameter(p.r());
    report.bound = Rational(1) / (pr * pr);
    for (const FlatRecord& rec : records) {
        HeightWidthEntry e;
        e.address = rec.address;
        e.range_width = rec.range_hi - rec.range_lo;
        e.interval_width = width(p, rec.address.n);
        e.passed = e.range_width <= e.interval_width;
        report.total_width += e.interval_width;
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::string to_csv(const Params& p, const LevelSetCover& c)
{
    std::ostringstream out;
    out << "n,j,left,right,range_lo,range_hi\n";
    for (const CoverInterval& iv : c.intervals) {
        out << iv.address.n << "," << iv.address.j.get_str() << "," << left_endpoint(p, iv.address) << ","
            << right_endpoint(p, iv.address) << "," << iv.range_lo << "," << iv.range_hi << "\n";
    }
    return out.str();
}

std::string to_csv(const Params& p, const std::vector<FlatRecord>& records)
{
    std::ostringstream out;
    out << "n,j,left,right,range_lo,range_hi\n";
    for (const FlatRecord& rec : records) {
        out << rec.address.n << "," << rec.address.j.get_str() << "," << left_endpoint(p, rec.address) << ","
            << right_endpoint(p, rec.address) << "," << rec.range_lo << "," << rec.range_hi << "\n";
    }
    return out.str();
}

std::string to_csv(const OccupationHistogram& h)
{
    std::ostringstream out;
    out << "bin,lo,hi,mass\n";
    char buf[64];
    for (long b = 0; b < h.bins; ++b) {
        const Rational lo = h.range_hi * Rational(b, h.bins);
        const Rational hi = h.range_hi * Rational(b + 1, h.bins);
        std::snprintf(buf, sizeof buf, "%.17g", h.masses[static_cast<std::size_t>(b)]);
        out << b << "," << lo << "," << hi << "," << buf << "\n";
    }
    return out.str();
}

} // namespace takagi

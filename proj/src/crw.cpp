#include "takagi/crw.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "takagi/errors.hpp"
#include "takagi/random.hpp"

namespace takagi {

Rational crw_parameter(long r)
{
    if (r < 2) {
        throw std::invalid_argument("crw_parameter: r must be >= 2");
    }
    return r % 2 == 0 ? Rational(1, 2) : Rational(r + 1, 2 * r);
}

Rational exact_transition_count(const Params& p, long n)
{
    if (n < 1) {
        throw std::invalid_argument("exact_transition_count: n must be >= 1");
    }
    if (interval_count(p, n) > kTransitionCountCap) {
        throw DepthCap("exact_transition_count: 2r^(n-1) exceeds " + std::to_string(kTransitionCountCap));
    }
    // Depth-(n+1) interval j: phi_n^+ = +1 iff j is even, and
    // phi_(n-1)^+ = +1 iff its parent q = floor(j/r) is even.
    const std::uint64_t r = static_cast<std::uint64_t>(p.r());
    const std::uint64_t parents = interval_count(p, n).get_ui();
    std::uint64_t given = 0;
    std::uint64_t both = 0;
    for (std::uint64_t q = 0; q < parents; q += 2) {
        const std::uint64_t first = q * r;
        given += r;
        // even j in [first, first + r)
        both += (r + (first % 2 == 0 ? 1 : 0)) / 2;
    }
    return Rational(Integer(static_cast<unsigned long>(both)), Integer(static_cast<unsigned long>(given)));
}

const char* constraint_name(WalkConstraint c)
{
    switch (c) {
    case WalkConstraint::None:
        return "none";
    case WalkConstraint::NonnegUpTo:
        return "nonnegUpTo";
    case WalkConstraint::PositiveUpTo:
        return "positiveUpTo";
    }
    return "unknown";
}

namespace {

// Integer path weights over the common denominator 2b^k after k steps,
// where p = a/b.
class Chain {
public:
    Chain(const Rational& p, long max_steps, bool flying)
        : a_(p.numerator()), b_(p.denominator()), offset_(max_steps),
          up_(static_cast<std::size_t>(2 * max_steps + 1)), down_(up_.size())
    {
        if (p.sign() < 0 || p > Rational(1)) {
            throw std::invalid_argument("crw: p must lie in [0,1]");
        }
        if (max_steps >= 1) {
            up_[idx(1)] = flying ? 2 * a_ : b_;
            down_[idx(-1)] = flying ? 2 * (b_ - a_) : b_;
            steps_ = 1;
            denominator_ = 2 * b_;
        }
    }

    void step()
    {
        std::vector<Integer> up(up_.size());
        std::vector<Integer> down(down_.size());
        const Integer flip = b_ - a_;
        for (long s = -steps_; s <= steps_; ++s) {
            const std::size_t i = idx(s);
            if (up_[i] != 0) {
                up[i + 1] += up_[i] * a_;
                down[i - 1] += up_[i] * flip;
            }
            if (down_[i] != 0) {
                down[i - 1] += down_[i] * a_;
                up[i + 1] += down_[i] * flip;
            }
        }
        up_.swap(up);
        down_.swap(down);
        ++steps_;
        denominator_ *= b_;
    }

    void restrict(WalkConstraint c)
    {
        if (c == WalkConstraint::None) {
            return;
        }
        const long lowest = c == WalkConstraint::NonnegUpTo ? 0 : 1;
        for (long s = -steps_; s < lowest; ++s) {
            up_[idx(s)] = 0;
            down_[idx(s)] = 0;
        }
    }

    long steps() const { return steps_; }
    const Integer& denominator() const { return denominator_; }
    const Integer& up(long s) const { return up_[idx(s)]; }
    const Integer& down(long s) const { return down_[idx(s)]; }

private:
    std::size_t idx(long s) const { return static_cast<std::size_t>(s + offset_); }

    Integer a_;
    Integer b_;
    long offset_;
    long steps_ = 0;
    Integer denominator_ = 1;
    std::vector<Integer> up_;
    std::vector<Integer> down_;
};

} // namespace

Rational CrwDistribution::total() const
{
    Rational sum;
    for (const auto& [key, value] : table) {
        sum += value;
    }
    return sum;
}

Rational CrwDistribution::at(long s) const
{
    Rational sum;
    for (int last : {-1, 0, 1}) {
        if (auto it = table.find({s, last}); it != table.end()) {
            sum += it->second;
        }
    }
    return sum;
}

CrwDistribution crw_dp(const Rational& p, long n, WalkConstraint constraint, bool flying_start)
{
    if (n < 0 || n > kMaxDpSteps) {
        throw std::invalid_argument("crw_dp: n must lie in [0, " + std::to_string(kMaxDpSteps) + "]");
    }
    CrwDistribution out{p, n, constraint, flying_start, {}};
    if (n == 0) {
        out.table[{0, 0}] = 1;
        return out;
    }
    Chain chain(p, n, flying_start);
    while (chain.steps() < n) {
        chain.restrict(constraint);
        chain.step();
    }
    for (long s = -n; s <= n; ++s) {
        if (chain.up(s) != 0) {
            out.table[{s, 1}] = Rational(chain.up(s), chain.denominator());
        }
        if (chain.down(s) != 0) {
            out.table[{s, -1}] = Rational(chain.down(s), chain.denominator());
        }
    }
    return out;
}

AbSequences a_b_sequences(const Rational& p, long max_n)
{
    if (max_n < 1 || max_n > kMaxAbTerms) {
        throw std::invalid_argument("a_b_sequences: N must lie in [1, " + std::to_string(kMaxAbTerms) + "]");
    }
    AbSequences out{p, {}, {}};
    const auto run = [&](WalkConstraint c, std::vector<Rational>& dest) {
        Chain chain(p, max_n, false);
        for (;;) {
            dest.push_back(Rational(chain.up(0) + chain.down(0), chain.denominator()));
            if (chain.steps() == max_n) {
                break;
            }
            chain.restrict(c);
            chain.step();
        }
    };
    run(WalkConstraint::NonnegUpTo, out.a);
    run(WalkConstraint::PositiveUpTo, out.b);
    return out;
}

std::string to_csv(const AbSequences& ab)
{
    std::ostringstream out;
    out << "n,a_n,b_n,b_n+2/a_n\n";
    for (std::size_t k = 0; k < ab.a.size(); ++k) {
        out << k + 1 << "," << ab.a[k] << "," << ab.b[k] << ",";
        if (k + 2 < ab.b.size() && ab.a[k].sign() != 0) {
            out << ab.b[k + 2] / ab.a[k];
        }
        out << "\n";
    }
    return out.str();
}

SlopeMeasure slope_measure_check(const Params& p, long n)
{
    if (n < 1) {
        throw std::invalid_argument("slope_measure_check: n must be >= 1");
    }
    if (ipow(p.r(), static_cast<unsigned long>(n)) > kSlopeMeasureCap) {
        throw DepthCap("slope_measure_check: r^n exceeds " + std::to_string(kSlopeMeasureCap));
    }
    const std::uint64_t r = static_cast<std::uint64_t>(p.r());
    const std::uint64_t count = interval_count(p, n).get_ui();
    // scale[k] = r^(n-k): the depth-k ancestor of (n, j) is floor(j / r^(n-k)).
    std::vector<std::uint64_t> scale(static_cast<std::size_t>(n) + 1, 1);
    for (long k = n - 1; k >= 1; --k) {
        scale[static_cast<std::size_t>(k)] = scale[static_cast<std::size_t>(k) + 1] * r;
    }
    std::uint64_t hits = 0;
    for (std::uint64_t j = 0; j < count; ++j) {
        long s = 0;
        bool ok = true;
        for (long k = 1; k <= n && ok; ++k) {
            const std::uint64_t ancestor = j / scale[static_cast<std::size_t>(k)];
            s += ancestor % 2 == 0 ? 1 : -1;
            ok = k < n ? s >= 0 : s == 0;
        }
        hits += ok ? 1 : 0;
    }
    SlopeMeasure out;
    out.counted = Rational(Integer(static_cast<unsigned long>(hits)), interval_count(p, n));
    out.dp = a_b_sequences(crw_parameter(p.r()), n).a_at(n);
    return out;
}

double SimulationSummary::transition_frequency() const
{
    return transitions == 0 ? 0.0 : static_cast<double>(repeats) / static_cast<double>(transitions);
}

double SimulationSummary::hit_zero_fraction() const
{
    return paths == 0 ? 0.0 : static_cast<double>(hit_zero) / static_cast<double>(paths);
}

double SimulationSummary::mean_zeros() const
{
    return paths == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(paths);
}

double SimulationSummary::a_estimate(long n) const
{
    if (paths == 0 || n < 1 || n > static_cast<long>(a_counts.size())) {
        return 0.0;
    }
    return static_cast<double>(a_counts[static_cast<std::size_t>(n - 1)]) / static_cast<double>(paths);
}

SimulationSummary simulate(const Rational& p, long steps, long paths, std::uint64_t seed)
{
    if (p.sign() < 0 || p > Rational(1) || !p.denominator().fits_ulong_p()) {
        throw std::invalid_argument("simulate: p must lie in [0,1] with a 64-bit denominator");
    }
    SimulationSummary out;
    out.seed = seed;
    out.p = p;
    out.steps = std::max(0L, steps);
    out.paths = std::max(0L, paths);
    const long a_terms = std::min(out.steps, kSimulatedATerms);
    out.a_counts.assign(static_cast<std::size_t>(a_terms), 0);
    if (out.paths == 0 || out.steps == 0) {
        return out;
    }
    const std::uint64_t num = p.numerator().get_ui();
    const std::uint64_t den = p.denominator().get_ui();

    struct Partial {
        std::uint64_t repeats = 0;
        std::uint64_t zeros = 0;
        long hit_zero = 0;
        std::vector<long> a_counts;
    };
    const std::size_t total = static_cast<std::size_t>(out.paths);
    const std::size_t chunks = std::min<std::size_t>(total, 256);
    std::vector<Partial> partial(chunks);
    parallel_chunks(total, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Partial& acc = partial[chunk];
        acc.a_counts.assign(static_cast<std::size_t>(a_terms), 0);
        for (std::size_t path = begin; path < end; ++path) {
            Stream rng(seed, path);
            int last = rng.bernoulli(1, 2) ? 1 : -1;
            long s = last;
            bool nonneg = s >= 0;
            bool hit = false;
            for (long k = 2; k <= out.steps; ++k) {
                const int step = rng.bernoulli(num, den) ? last : -last;
                acc.repeats += step == last ? 1 : 0;
                last = step;
                s += step;
                if (s == 0) {
                    ++acc.zeros;
                    hit = true;
                    if (nonneg && k <= a_terms) {
                        ++acc.a_counts[static_cast<std::size_t>(k - 1)];
                    }
                }
                nonneg = nonneg && s >= 0;
            }
            acc.hit_zero += hit ? 1 : 0;
        }
    });
    for (const Partial& acc : partial) {
        out.repeats += acc.repeats;
        out.zeros += acc.zeros;
        out.hit_zero += acc.hit_zero;
        for (std::size_t k = 0; k < acc.a_counts.size(); ++k) {
            out.a_counts[k] += acc.a_counts[k];
        }
    }
    out.transitions = static_cast<std::uint64_t>(out.paths) * static_cast<std::uint64_t>(out.steps - 1);
    return out;
}

std::string to_text(const SimulationSummary& s)
{
    std::ostringstream out;
    char buf[64];
    const auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    out << "seed " << s.seed << "\n"
        << "stream takagi-stream v" << Stream::kVersion << "\n"
        << "p " << s.p << "\n"
        << "steps " << s.steps << "\n"
        << "paths " << s.paths << "\n"
        << "transition_frequency " << fmt(s.transition_frequency()) << "\n"
        << "hit_zero_fraction " << fmt(s.hit_zero_fraction()) << "\n"
        << "mean_zeros " << fmt(s.mean_zeros()) << "\n";
    for (long n = 1; n <= static_cast<long>(s.a_counts.size()); ++n) {
        out << "a_" << n << " " << fmt(s.a_estimate(n)) << "\n";
    }
    return out.str();
}

} // namespace takagi

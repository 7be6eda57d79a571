#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include "takagi/exact.hpp"
#include "takagi/rational.hpp"

namespace takagi {

/// Seedable, splittable random stream ("takagi-stream v1").
///
/// A stream is a std::mt19937_64 whose seed is splitmix64-derived from
/// (seed, stream index), so every substream is reproducible independently of
/// how work is scheduled across threads. Only raw 64-bit outputs are consumed;
/// no implementation-defined std distributions are used.
class Stream {
public:
    static constexpr int kVersion = 1;

    explicit Stream(std::uint64_t seed, std::uint64_t index = 0);

    std::uint64_t next() { return engine_(); }
    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform double in [0,1) with 53 random bits.
    double unit();
    /// True with probability num/den exactly (0 <= num <= den, den > 0).
    bool bernoulli(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Worker count: TAKAGI_LAB_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs body(begin, end) over [0, count) split into contiguous chunks, one per
/// worker. Callers merge per-chunk results in chunk order for determinism.
void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

/// Uniform k/2^64 grid point in [0,1).
Rational random_dyadic(Stream& s);

/// Uniform grid point k/q in (0,1) with q = denominator, redrawn while it is a
/// corner point for r up to max_level.
Rational random_grid_point(Stream& s, const Params& p, std::uint64_t denominator, long max_level);

} // namespace takagi

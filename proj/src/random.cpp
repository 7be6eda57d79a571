#include "takagi/random.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace takagi {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t index)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)))
{
}

std::uint64_t Stream::below(std::uint64_t bound)
{
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
        v = engine_();
    } while (limit != 0 && v >= limit);
    return v % bound;
}

double Stream::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

unsigned worker_count()
{
    if (const char* env = std::getenv("TAKAGI_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body)
{
    if (count == 0 || chunks == 0) {
        return;
    }
    chunks = std::min(chunks, count);
    const std::size_t workers = std::min<std::size_t>(worker_count(), chunks);
    const auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = count * c / chunks;
        const std::size_t end = count * (c + 1) / chunks;
        body(c, begin, end);
    };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            run_chunk(c);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += workers) {
                run_chunk(c);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

Rational random_dyadic(Stream& s)
{
    static_assert(sizeof(unsigned long) == sizeof(std::uint64_t));
    return Rational(Integer(static_cast<unsigned long>(s.next())), ipow(2, 64));
}

Rational random_grid_point(Stream& s, const Params& p, std::uint64_t denominator, long max_level)
{
    for (;;) {
        const std::uint64_t k = 1 + s.below(denominator - 1);
        Rational x(Integer(static_cast<unsigned long>(k)), Integer(static_cast<unsigned long>(denominator)));
        if (!corner_level(p, x, max_level)) {
            return x;
        }
    }
}

} // namespace takagi

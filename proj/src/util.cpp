#include "glyph/util.hpp"

#include <cstdlib>
#include <thread>

namespace glyph {

int worker_count() {
    if (const char* env = std::getenv("GLYPH_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t nchunks = chunk_count(n, chunk_size);
    const int workers = worker_count();
    if (workers <= 1 || nchunks <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(std::min<std::size_t>(workers, nchunks));
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = static_cast<std::size_t>(w); c < nchunks; c += nw)
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        });
    }
    for (auto& t : pool) t.join();
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace glyph

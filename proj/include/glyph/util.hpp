#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace glyph {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double gaussian(Rng& rng, double mean, double stddev) {
    std::normal_distribution<double> dist(mean, stddev);
    return dist(rng);
}

// Thread count: GLYPH_THREADS env var, else hardware concurrency.
int worker_count();

// Runs fn(begin, end) over [0, n) split into chunks. Chunk boundaries are
// fixed by n alone, so per-chunk results reduced in chunk order are
// reproducible regardless of worker count.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t chunk_index, std::size_t begin, std::size_t end)>& fn);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
    return chunk_size == 0 ? 0 : (n + chunk_size - 1) / chunk_size;
}

// FNV-1a over raw bytes, for provenance hashes in CLI summaries.
std::uint64_t fnv1a(std::span<const unsigned char> bytes);

}  // namespace glyph

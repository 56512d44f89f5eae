#include <doctest.h>

#include <atomic>
#include <cstring>
#include <numeric>
#include <vector>

#include "glyph/util.hpp"

using namespace glyph;

TEST_CASE("chunk_count rounds up") {
    CHECK(chunk_count(0, 4) == 0);
    CHECK(chunk_count(1, 4) == 1);
    CHECK(chunk_count(4, 4) == 1);
    CHECK(chunk_count(5, 4) == 2);
    CHECK(chunk_count(8, 4) == 2);
    CHECK(chunk_count(9, 4) == 3);
    CHECK(chunk_count(7, 0) == 0);
}

TEST_CASE("parallel_chunks covers [0, n) exactly once with fixed boundaries") {
    const std::size_t n = 1037, chunk = 64;
    std::vector<std::atomic<int>> hits(n);
    std::vector<std::size_t> begins(chunk_count(n, chunk), n);
    parallel_chunks(n, chunk, [&](std::size_t ci, std::size_t b, std::size_t e) {
        begins[ci] = b;
        CHECK(e - b <= chunk);
        for (std::size_t k = b; k < e; ++k) hits[k]++;
    });
    for (std::size_t k = 0; k < n; ++k) CHECK(hits[k].load() == 1);
    for (std::size_t ci = 0; ci < begins.size(); ++ci) CHECK(begins[ci] == ci * chunk);
}

TEST_CASE("fnv1a matches published reference values") {
    // Reference vectors for 64-bit FNV-1a.
    auto hash = [](const char* s) {
        return fnv1a({reinterpret_cast<const unsigned char*>(s), std::strlen(s)});
    };
    CHECK(fnv1a({}) == 0xcbf29ce484222325ull);
    CHECK(hash("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hash("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("seeded rng streams are reproducible") {
    Rng a = make_rng(42), b = make_rng(42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    Rng c = make_rng(43);
    bool differs = false;
    Rng d = make_rng(42);
    for (int i = 0; i < 10; ++i) differs |= (c() != d());
    CHECK(differs);
}

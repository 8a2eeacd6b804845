#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

namespace confsweep {

// Deterministic 64-bit mixing (splitmix64 finalizer). Used for invariant
// values and search-state fingerprints; must be stable across platforms,
// so std::hash is not an option.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
    return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline uint64_t hash_bytes(const void* data, size_t len, uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = mix64(seed ^ (0x2545F4914F6CDD1DULL + len));
    while (len >= 8) {
        uint64_t w;
        std::memcpy(&w, p, 8);
        h = hash_combine(h, w);
        p += 8;
        len -= 8;
    }
    uint64_t tail = 0;
    for (size_t i = 0; i < len; ++i) tail |= uint64_t(p[i]) << (8 * i);
    if (len) h = hash_combine(h, tail);
    return mix64(h);
}

struct Hash128 {
    uint64_t a = 0, b = 0;
    bool operator==(const Hash128&) const = default;
};

inline Hash128 hash128_bytes(const void* data, size_t len) {
    Hash128 h{hash_bytes(data, len, 0x5bf03635d6a05dd1ULL),
              hash_bytes(data, len, 0x9b0a2b6fb1d5c6e3ULL)};
    if (h.a == 0 && h.b == 0) h = {1, 1};  // {0,0} is the empty-slot sentinel
    return h;
}

inline uint64_t hash_u64_vec(const std::vector<uint64_t>& v, uint64_t seed) {
    return hash_bytes(v.data(), v.size() * sizeof(uint64_t), seed);
}

}  // namespace confsweep

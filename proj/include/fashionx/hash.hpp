#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fashionx {

// FNV-1a, used for cache keys, shard checksums and seed derivation.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// 128-bit content digest as hex; two independent FNV streams.
inline std::string content_digest(std::string_view data) {
    std::uint64_t a = fnv1a64(data);
    std::uint64_t b = fnv1a64(data, 0x9e3779b97f4a7c15ull);
    return to_hex(a) + to_hex(b);
}

}  // namespace fashionx

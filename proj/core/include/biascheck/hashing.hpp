#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace biascheck::hashing {

// FNV-1a. Used for cache keys, deterministic sampling and content digests;
// not cryptographic.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

inline std::string to_hex(std::uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
        value >>= 4;
    }
    return out;
}

// 128-bit digest rendered as 32 hex chars: two FNV-1a passes with distinct seeds.
inline std::string digest_hex(std::string_view data) {
    const std::uint64_t a = fnv1a64(data);
    const std::uint64_t b = fnv1a64(data, kFnvOffset ^ 0x5bd1e9955bd1e995ull);
    return to_hex(a) + to_hex(b);
}

}  // namespace biascheck::hashing

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fairsense {

// FNV-1a 64-bit content digest, rendered as 16 hex chars. Used to tie
// baselines to the exact models they were computed from and to stamp a
// config digest into every output. Not cryptographic.

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string digest_hex(std::string_view bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace fairsense

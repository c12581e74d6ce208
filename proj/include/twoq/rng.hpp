#pragma once

#include <cstdint>

namespace twoq {

/// splitmix64 mix; used to derive independent seed streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d649bb133111ebULL;
    return x ^ (x >> 31);
}

/// Decorrelated sub-seed for stream index `stream` of a master seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

} // namespace twoq

#pragma once

#include <cstdint>

namespace hgtidf::detail {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept
{
    return mix64(seed ^ mix64(value));
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    return hash_combine(hash_combine(seed, a), b);
}

/// Maps a 64-bit word to a double in [0, 1) using the top 53 bits.
constexpr double to_unit_interval(std::uint64_t x) noexcept
{
    return static_cast<double>(x >> 11U) * 0x1.0p-53;
}

}  // namespace hgtidf::detail

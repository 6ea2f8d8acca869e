#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace leadrisk {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t MixBits(std::uint64_t x) noexcept;

// Seed for an independent stream, a pure function of (seed, a, b). Used so that
// per-tree and per-fold randomness never depends on thread scheduling.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

Rng MakeRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes) noexcept;

}  // namespace leadrisk

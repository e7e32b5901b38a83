#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

// Seed derivation and distribution helpers. The engine is std::mt19937_64,
// whose output sequence is fixed by the standard; the distributions below are
// written out here because the std:: ones are implementation-defined.
namespace emowalk::rng {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t x) noexcept;

/// Child seed for a (seed, part...) path. Order of parts matters.
std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) noexcept;

/// FNV-1a, 64 bit.
std::uint64_t hash_string(std::string_view s) noexcept;

/// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Engine& eng, std::uint64_t n);

/// Uniform integer in [lo, hi], inclusive.
std::int64_t uniform_int(Engine& eng, std::int64_t lo, std::int64_t hi);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Engine& eng);

/// Standard normal via Box-Muller (no cached second value).
double normal(Engine& eng);

template <typename T>
void shuffle(Engine& eng, std::span<T> v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace emowalk::rng

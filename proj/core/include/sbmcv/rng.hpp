#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace sbmcv {

// Every stochastic routine takes one of these by reference. Streams are never
// shared between workers; each work unit derives its own seed.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw. Unlike
// std::uniform_real_distribution the mapping is fixed, so sampled networks are
// reproducible across standard library implementations.
double uniform01(Rng& rng);

// Unbiased integer in [0, bound) by rejection; bound must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Fisher-Yates, using uniform_below so the result only depends on the engine.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// 64-bit FNV-1a of the bytes of `text`.
std::uint64_t hash_string(std::string_view text);

// Pure, version-stable seed derivation:
//   h = mix64(master); for each part p: h = mix64(h ^ mix64(p + 0x9e3779b97f4a7c15))
// Distinct coordinate tuples give distinct streams with overwhelming probability.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

}  // namespace sbmcv

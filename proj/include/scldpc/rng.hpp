#pragma once

#include <cstdint>
#include <random>

namespace scldpc {

// splitmix64 step: advances the state and returns the next output word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless word of a counter-based stream: word k of stream `seed`.
inline std::uint64_t stream_word(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t s = seed + (k + 1) * 0x9e3779b97f4a7c15ULL;
  return splitmix64(s);
}

// Mixes salts into a seed one at a time; used to derive independent
// substreams (per trial, per purpose) from a single master seed. The
// derivation depends only on the argument values, never on call order
// elsewhere, which is what makes results worker-count invariant.
inline std::uint64_t derive_seed(std::uint64_t seed) { return seed; }

template <class... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, Rest... rest) {
  std::uint64_t s = seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  return derive_seed(splitmix64(s), rest...);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace scldpc

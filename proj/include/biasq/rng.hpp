#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace biasq {

/// Seeded random stream used everywhere in the project.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Derived quantities use only that raw stream so results do not
/// depend on the standard library's distribution implementations:
///
///   uniform01()       (x >> 11) * 2^-53, a double in [0, 1)
///   normal()          Box-Muller cosine branch; consumes two uniforms
///                     u1 = 1 - uniform01() in (0, 1], u2 = uniform01(),
///                     returns sqrt(-2 ln u1) * cos(2 pi u2). No caching.
///   uniform_index(n)  floor(uniform01() * n), clamped to n - 1
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double normal();
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

/// Independent child seed for a named sub-stream: splitmix64(master ^ fnv1a64(label)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

}  // namespace biasq

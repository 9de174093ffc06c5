#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stream_kpca {

/// Seed for the named sub-stream `stream` of master seed `seed`:
/// splitmix64(seed ^ fnv1a64(stream)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

/// Seedable generator for one named stream. The engine is std::mt19937_64 (fully
/// specified by the standard); the uniform and normal transforms are computed here
/// rather than through <random> distributions so draws are identical across
/// standard library implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 random bits.
  double uniform01();
  // (0, 1].
  double uniform_open_closed() { return 1.0 - uniform01(); }
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  // Uniform integer in [0, n), n >= 1, by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stream_kpca

#pragma once

#include <cstdint>
#include <random>

namespace mubcv {

// Seeded generator with a fully specified algorithm: std::mt19937_64 (whose
// output sequence is fixed by the standard), 53-bit uniforms, Box-Muller
// normals and a Poisson sampler that uses sequential inversion below mean 30
// and a rounded normal approximation above. Streams are bit-reproducible for
// a fixed seed on any conforming standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// Derives an independent substream seed from (seed, stream) with splitmix64.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mubcv

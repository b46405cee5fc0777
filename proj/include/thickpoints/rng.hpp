#pragma once

#include <cstdint>

namespace thickpoints {

// xoshiro256++ seeded through splitmix64. Substreams are keyed by
// (seed, stream, index) so replicate results never depend on how work is
// distributed over threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  static Rng substream(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index = 0);

  void reseed(std::uint64_t seed);

  std::uint64_t next_u64();

  // uniform on [0,1) with 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform_in(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal (Marsaglia polar, cached pair)
  double normal();

  double exponential();  // rate 1

  // Poisson count; exp-spacing product for small means, PTRS-lite rejection
  // is not needed at the means this project uses (lambda <= ~64 guarded).
  int poisson(double lambda);

  double gamma(double shape);  // scale 1, shape > 0
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::uint64_t s_[4];
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Stable 64-bit string hash (FNV-1a), used to key RNG streams by test id.
std::uint64_t hash64(const char* str);

}  // namespace thickpoints

#include "thickpoints/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace thickpoints {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash64(const char* str) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *str; ++str) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*str));
    h *= 0x100000001b3ULL;
  }
  return h;
}

void Rng::reseed(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
  have_cached_normal_ = false;
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t index) {
  std::uint64_t st = seed;
  std::uint64_t a = splitmix64(st);
  st = a ^ (stream * 0x9e3779b97f4a7c15ULL);
  std::uint64_t b = splitmix64(st);
  st = b ^ (index * 0xd1342543de82ef95ULL);
  Rng r(splitmix64(st));
  return r;
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  have_cached_normal_ = true;
  return u * f;
}

double Rng::exponential() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return -std::log(u);
}

int Rng::poisson(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("poisson: negative mean");
  if (lambda == 0.0) return 0;
  if (lambda <= 30.0) {
    // exponential-spacing product, O(lambda)
    const double limit = std::exp(-lambda);
    double prod = 1.0;
    int k = -1;
    do {
      prod *= uniform();
      ++k;
    } while (prod > limit);
    return k;
  }
  // Hoermann's PTRS transformed rejection (exact)
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    const double u = uniform() - 0.5;
    double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<int>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lambda - lambda - std::lgamma(k + 1.0))
      return static_cast<int>(k);
  }
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) throw std::invalid_argument("gamma: shape <= 0");
  if (shape < 1.0) {
    // boost to shape+1 and scale back
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u > 0 ? u : 1e-300, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

}  // namespace thickpoints

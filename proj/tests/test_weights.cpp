#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "thickpoints/rng.hpp"
#include "thickpoints/weights.hpp"

using namespace thickpoints;

namespace {

// Brute-force evaluation of the weight series: enumerate every subset of L
// distinct excursions (each set once, matching the sum's definition), product
// of xi over the subset, weighted by alpha^{L-1}/(L-1)!. Independent of the
// generating-function path.
double brute_force_weight(const std::vector<double>& xs, double alpha,
                          double capacity) {
  const std::size_t n = xs.size();
  double sum = 0.0;
  for (std::size_t mask = 1; mask < (1u << n); ++mask) {
    double prod = 1.0;
    int L = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) {
        prod *= xs[j];
        ++L;
      }
    double coef = 1.0;
    for (int i = 1; i < L; ++i) coef *= alpha / i;
    sum += coef * prod;
  }
  return std::exp(-alpha * capacity) * sum;
}

}  // namespace

TEST_CASE("frozen small cases") {
  // xi={1,2}, alpha=1, capacity=0: L=1 gives 3, L=2 gives alpha*e2 = 2
  WeightInput w{{1.0, 2.0}, 1.0, 0.0};
  CHECK(brute_force_weight(w.xi_values, w.alpha, w.capacity) == doctest::Approx(5.0));
  CHECK(martingale_weight(w) == doctest::Approx(5.0).epsilon(1e-14));

  // alpha = 0 collapses to the plain sum
  w.alpha = 0.0;
  CHECK(martingale_weight(w) == doctest::Approx(3.0));

  // empty set
  CHECK(martingale_weight({{}, 1.0, 0.5}) == 0.0);
}

TEST_CASE("generating function equals enumeration for n <= 6") {
  Rng rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = 4.0 * rng.uniform();
    const double alpha = 2.0 * rng.uniform();
    const double cap = 3.0 * rng.uniform();
    const double a = martingale_weight({xs, alpha, cap});
    const double b = brute_force_weight(xs, alpha, cap);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("avoiding-x variant") {
  std::vector<double> xs{0.5, 1.5, 2.5};
  SUBCASE("all hit x") {
    CHECK(martingale_weight_avoiding_x(xs, {true, true, true}, 1.0, 0.0) == 0.0);
  }
  SUBCASE("none hit x") {
    CHECK(martingale_weight_avoiding_x(xs, {false, false, false}, 1.0, 0.2) ==
          doctest::Approx(martingale_weight({xs, 1.0, 0.2})));
  }
  SUBCASE("mixed equals enumeration on the survivors") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
      std::vector<double> v(n);
      std::vector<bool> f(n);
      std::vector<double> kept;
      for (int i = 0; i < n; ++i) {
        v[i] = 4.0 * rng.uniform();
        f[i] = rng.uniform() < 0.5;
        if (!f[i]) kept.push_back(v[i]);
      }
      const double alpha = 1.3;
      const double got = martingale_weight_avoiding_x(v, f, alpha, 0.1);
      const double want = brute_force_weight(kept, alpha, 0.1);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("monotone in added excursions") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(3);
    for (auto& x : xs) x = 0.1 + 3.9 * rng.uniform();
    const double alpha = 0.1 + rng.uniform();
    const double base = martingale_weight({xs, alpha, 0.3});
    auto more = xs;
    more.push_back(0.5);
    CHECK(martingale_weight({more, alpha, 0.3}) > base);
  }
}

TEST_CASE("series bound M <= Upsilon e^{-aC} e^{2 sqrt(a Upsilon)}") {
  Rng rng(4242);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 12.0);
    std::vector<double> xs(n);
    double ups = 0.0;
    for (auto& x : xs) {
      x = 4.0 * rng.uniform();
      ups += x;
    }
    const double alpha = 2.0 * rng.uniform();
    const double cap = 2.0 * rng.uniform();
    const double m = martingale_weight({xs, alpha, cap});
    CHECK(m <= truncated_weight_bound(ups, alpha, cap) * (1.0 + 1e-12));
  }
}

TEST_CASE("log-space fallback agrees on large inputs") {
  std::vector<double> xs(400, 4.0);
  const double alpha = 1.9;
  // e_L overflow forces the log path; check against a moderate case scaled
  const double m = martingale_weight({xs, alpha, 0.0});
  CHECK(std::isfinite(m));
  CHECK(m > 0.0);
  // bound still holds
  CHECK(m <= truncated_weight_bound(1600.0, alpha, 0.0));
}

TEST_CASE("upsilon plain sum") {
  CHECK(upsilon_sum(std::vector<double>{}) == 0.0);
  CHECK(upsilon_sum(std::vector<double>{1.0, 2.5}) == doctest::Approx(3.5));
}

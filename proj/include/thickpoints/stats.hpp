#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace thickpoints {

// Streamed mean/variance (Welford). merge() uses Chan's update so chunked
// parallel reductions give the same result as a serial pass when chunks are
// merged in a fixed order.
struct Welford {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) { *this = o; return; }
    const double d = o.mean - mean;
    const double nn = static_cast<double>(n) + static_cast<double>(o.n);
    mean += d * static_cast<double>(o.n) / nn;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / nn;
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const;
};

// Deterministic replicated Monte Carlo: runs fn(rng, i) for i in [0, n) with
// per-replicate substreams keyed by (seed, stream, i); reduction order is
// fixed chunk order regardless of the worker count.
Welford mc_run(std::uint64_t seed, std::uint64_t stream, long long n,
               const std::function<double(class Rng&, long long)>& fn,
               int n_threads = 0);

// Same driver collecting d statistics per replicate.
std::vector<Welford> mc_run_vec(
    std::uint64_t seed, std::uint64_t stream, long long n, int d,
    const std::function<void(class Rng&, long long, double*)>& fn,
    int n_threads = 0);

// --- special functions ---------------------------------------------------
double normal_cdf(double z);
double regularized_gamma_p(double a, double x);  // P(a,x)
double regularized_gamma_q(double a, double x);  // Q(a,x) = 1 - P
double chi2_sf(double x, double dof);            // survival function
// two-sided Kolmogorov limit distribution survival Q(lambda)
double kolmogorov_sf(double lambda);

// --- tests ----------------------------------------------------------------
// Pearson chi-square p-value from observed counts vs expected probabilities.
double chi2_gof_pvalue(const std::vector<long long>& observed,
                       const std::vector<double>& expected_prob);

// two-sample Kolmogorov-Smirnov p-value (asymptotic)
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

// one-sample t-test p-value for mean == 0 (two-sided, normal approx; all our
// sample sizes are >= 1e3)
double mean_zero_pvalue(const Welford& w);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace thickpoints

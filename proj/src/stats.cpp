#include "thickpoints/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "thickpoints/rng.hpp"

namespace thickpoints {

double Welford::std_error() const {
  if (n < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n));
}

namespace {
constexpr long long kChunk = 1024;
}

std::vector<Welford> mc_run_vec(
    std::uint64_t seed, std::uint64_t stream, long long n, int d,
    const std::function<void(Rng&, long long, double*)>& fn, int n_threads) {
  const long long n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::vector<Welford>> per_chunk(
      static_cast<std::size_t>(n_chunks), std::vector<Welford>(d));

  auto run_chunk = [&](long long c) {
    const long long lo = c * kChunk;
    const long long hi = std::min(n, lo + kChunk);
    std::vector<double> buf(static_cast<std::size_t>(d));
    for (long long i = lo; i < hi; ++i) {
      Rng rng = Rng::substream(seed, stream, static_cast<std::uint64_t>(i));
      fn(rng, i, buf.data());
      for (int j = 0; j < d; ++j) per_chunk[c][j].add(buf[j]);
    }
  };

  int workers = n_threads > 0 ? n_threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1 || n_chunks <= 1) {
    for (long long c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<long long>(workers, n_chunks));
    for (int t = 0; t < spawn; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const long long c = next.fetch_add(1);
          if (c >= n_chunks) return;
          run_chunk(c);
        }
      });
    for (auto& t : pool) t.join();
  }

  std::vector<Welford> out(d);
  for (long long c = 0; c < n_chunks; ++c)
    for (int j = 0; j < d; ++j) out[j].merge(per_chunk[c][j]);
  return out;
}

Welford mc_run(std::uint64_t seed, std::uint64_t stream, long long n,
               const std::function<double(Rng&, long long)>& fn, int n_threads) {
  auto v = mc_run_vec(seed, stream, n, 1,
                      [&](Rng& r, long long i, double* out) { out[0] = fn(r, i); },
                      n_threads);
  return v[0];
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int k = 1; k < 500; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  // Lentz continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, double dof) {
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

double chi2_gof_pvalue(const std::vector<long long>& observed,
                       const std::vector<double>& expected_prob) {
  if (observed.size() != expected_prob.size())
    throw std::invalid_argument("chi2_gof: size mismatch");
  long long total = 0;
  for (auto c : observed) total += c;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_prob[i] * static_cast<double>(total);
    if (e <= 0.0) throw std::invalid_argument("chi2_gof: zero expected bin");
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
  }
  return chi2_sf(stat, static_cast<double>(observed.size() - 1));
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    d = std::max(d, std::abs(fa - fb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
}

double mean_zero_pvalue(const Welford& w) {
  if (w.n < 2) return 1.0;
  const double se = w.std_error();
  if (se == 0.0) return w.mean == 0.0 ? 1.0 : 0.0;
  const double z = w.mean / se;
  return 2.0 * (1.0 - normal_cdf(std::abs(z)));
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  if (x.size() > 2) f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

}  // namespace thickpoints

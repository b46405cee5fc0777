#include "thickpoints/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thickpoints {

std::vector<double> elementary_symmetric(const std::vector<double>& xs) {
  std::vector<double> e(xs.size() + 1, 0.0);
  e[0] = 1.0;
  std::size_t m = 0;
  for (const double x : xs) {
    ++m;
    for (std::size_t k = m; k >= 1; --k) e[k] += x * e[k - 1];
  }
  return e;
}

namespace {

// log-space variant for inputs whose products overflow
double weight_series_log(const std::vector<double>& xs, double alpha,
                         double capacity) {
  std::vector<double> le(xs.size() + 1, -std::numeric_limits<double>::infinity());
  le[0] = 0.0;
  auto lse = [](double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  };
  std::size_t m = 0;
  for (const double x : xs) {
    const double lx = std::log(x);
    ++m;
    for (std::size_t k = m; k >= 1; --k) le[k] = lse(le[k], lx + le[k - 1]);
  }
  const double la = std::log(alpha);
  double lsum = -std::numeric_limits<double>::infinity();
  for (std::size_t L = 1; L <= xs.size(); ++L) {
    const double lt = (static_cast<double>(L) - 1.0) * la -
                      std::lgamma(static_cast<double>(L)) + le[L];
    lsum = lse(lsum, lt);
  }
  return std::exp(lsum - alpha * capacity);
}

double weight_series(const std::vector<double>& xs, double alpha,
                     double capacity) {
  if (xs.empty()) return 0.0;
  double linear_sum = 0.0;
  for (const double x : xs) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("martingale_weight: xi must be finite, >= 0");
    linear_sum += x;
  }
  if (alpha == 0.0) return linear_sum;  // only L = 1 survives
  const auto e = elementary_symmetric(xs);
  if (!std::isfinite(e.back()) ||
      *std::max_element(e.begin(), e.end()) > 1e300)
    return weight_series_log(xs, alpha, capacity);
  // sum_{L>=1} alpha^{L-1}/(L-1)! e_L
  double sum = 0.0, coef = 1.0;  // coef = alpha^{L-1}/(L-1)!
  for (std::size_t L = 1; L <= xs.size(); ++L) {
    sum += coef * e[L];
    coef *= alpha / static_cast<double>(L);
    if (coef == 0.0) break;
  }
  if (sum > 1e290 && alpha > 0.0) return weight_series_log(xs, alpha, capacity);
  return std::exp(-alpha * capacity) * sum;
}

}  // namespace

double martingale_weight(const WeightInput& w) {
  return weight_series(w.xi_values, w.alpha, w.capacity);
}

double martingale_weight_avoiding_x(const std::vector<double>& xi_values,
                                    const std::vector<bool>& hits_x,
                                    double alpha, double capacity) {
  if (xi_values.size() != hits_x.size())
    throw std::invalid_argument("weight_avoiding_x: flag size mismatch");
  std::vector<double> kept;
  kept.reserve(xi_values.size());
  for (std::size_t i = 0; i < xi_values.size(); ++i)
    if (!hits_x[i]) kept.push_back(xi_values[i]);
  return weight_series(kept, alpha, capacity);
}

double truncated_xi(const TruncatedXiSpec& spec, Point u,
                    const TruncatedExcursion& e) {
  switch (e.kind) {
    case TruncatedEndpointCase::BothOnBoundary:
      return xi(spec.D1, u, e.e_g, e.e_d);
    case TruncatedEndpointCase::BothAtX: {
      const double h = kernel_H(spec.D1, u, spec.x);
      return sq(kTwoPi) * h * h / capacity_gap(spec.D1, spec.S, spec.x);
    }
    case TruncatedEndpointCase::Mixed: {
      auto diff = [&](Point p) {
        const double h1 = kernel_H(spec.D1, u, p);
        // convention: H_{D2}(u, p) = 0 when p is outside the closure of D2
        const double h2 = (spec.D2.classify(p) == PointClass::Outside)
                              ? 0.0
                              : kernel_H(spec.D2, u, p);
        return h1 - h2;
      };
      return kTwoPi * diff(e.e_g) * diff(e.e_d) /
             kernel_H(spec.D1, e.e_g, e.e_d);
    }
  }
  throw std::logic_error("truncated_xi: unreachable");
}

double truncated_weight(const TruncatedXiSpec& spec, Point u, double alpha,
                        const std::vector<TruncatedExcursion>& excursions) {
  std::vector<double> xs;
  xs.reserve(excursions.size());
  for (const auto& e : excursions) xs.push_back(truncated_xi(spec, u, e));
  return weight_series(xs, alpha, capacity(spec.D1, u));
}

double upsilon_sum(const TruncatedXiSpec& spec, Point u,
                   const std::vector<TruncatedExcursion>& excursions) {
  double s = 0.0;
  for (const auto& e : excursions) s += truncated_xi(spec, u, e);
  return s;
}

double upsilon_sum(const std::vector<double>& xi_values) {
  double s = 0.0;
  for (const double x : xi_values) s += x;
  return s;
}

double truncated_weight_bound(double upsilon, double alpha, double capacity) {
  return upsilon * std::exp(-alpha * capacity) *
         std::exp(2.0 * std::sqrt(alpha * upsilon));
}

}  // namespace thickpoints

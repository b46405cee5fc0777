#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace thickpoints {

// Planar points live in the complex plane; re/im are the two coordinates.
using Point = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double sq(double v) { return v * v; }
inline double norm2(Point p) { return std::norm(p); }
inline double dist(Point a, Point b) { return std::abs(a - b); }

inline bool finite(Point p) {
  return std::isfinite(p.real()) && std::isfinite(p.imag());
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace thickpoints

#include "thickpoints/fdsolve.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

namespace thickpoints {

FdPoissonOracle::FdPoissonOracle(const NiceDomain& rect, int n) {
  if (rect.kind() != DomainKind::Rect)
    throw std::invalid_argument("FdPoissonOracle: rectangle domains only");
  x0_ = rect.x0();
  y0_ = rect.y0();
  w_ = rect.x1() - rect.x0();
  h_ = rect.y1() - rect.y0();
  nx_ = n;
  ny_ = n;
  field_.assign(static_cast<std::size_t>(nx_ - 1) * (ny_ - 1), 0.0);
}

Point FdPoissonOracle::snap(Point p) const {
  const double hx = w_ / nx_, hy = h_ / ny_;
  int i = static_cast<int>(std::round((p.real() - x0_) / hx));
  int j = static_cast<int>(std::round((p.imag() - y0_) / hy));
  i = std::min(std::max(i, 1), nx_ - 1);
  j = std::min(std::max(j, 1), ny_ - 1);
  return Point(x0_ + i * hx, y0_ + j * hy);
}

Point FdPoissonOracle::set_source(Point src) {
  const double hx = w_ / nx_, hy = h_ / ny_;
  const Point s = snap(src);
  const int si = static_cast<int>(std::round((s.real() - x0_) / hx));
  const int sj = static_cast<int>(std::round((s.imag() - y0_) / hy));

  const int mx = nx_ - 1, my = ny_ - 1;
  std::fill(field_.begin(), field_.end(), 0.0);
  field_[static_cast<std::size_t>(sj - 1) * mx + (si - 1)] =
      -kTwoPi / (hx * hy);

  fftw_plan plan = fftw_plan_r2r_2d(my, mx, field_.data(), field_.data(),
                                    FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  fftw_execute(plan);
  // eigenvalues of the 5-point Laplacian for sine modes
  for (int q = 1; q <= my; ++q) {
    const double ly = (2.0 * std::cos(kPi * q / ny_) - 2.0) / (hy * hy);
    for (int p = 1; p <= mx; ++p) {
      const double lx = (2.0 * std::cos(kPi * p / nx_) - 2.0) / (hx * hx);
      field_[static_cast<std::size_t>(q - 1) * mx + (p - 1)] /= (lx + ly);
    }
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  const double norm = 1.0 / (4.0 * nx_ * ny_);
  for (auto& v : field_) v *= norm;
  return s;
}

double FdPoissonOracle::value_at(Point y) const {
  const double hx = w_ / nx_, hy = h_ / ny_;
  const Point s = snap(y);
  const int i = static_cast<int>(std::round((s.real() - x0_) / hx));
  const int j = static_cast<int>(std::round((s.imag() - y0_) / hy));
  return field_[static_cast<std::size_t>(j - 1) * (nx_ - 1) + (i - 1)];
}

}  // namespace thickpoints

#pragma once

#include <cmath>
#include <stdexcept>

namespace relaysec {

// Principal-branch Lambert W: the w >= -1 with w*exp(w) = x, defined for
// x >= -1/e.  Halley iteration from a piecewise initial guess; the residual
// is kept in the form w - x*exp(-w) so nothing overflows for large x.
inline double lambert_w0(double x) {
  if (std::isnan(x)) throw std::domain_error("lambert_w0: argument is NaN");
  if (x < -std::exp(-1.0)) throw std::domain_error("lambert_w0: argument below -1/e");
  if (x == 0.0) return 0.0;

  double w;
  if (x < -0.25) {
    // series around the branch point in p = sqrt(2(1 + e*x))
    const double p = std::sqrt(std::fmax(2.0 * (1.0 + std::exp(1.0) * x), 0.0));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
    if (p < 1e-4) return w;  // Halley divides by w+1, useless this close in
  } else if (x < 4.0) {
    w = std::log1p(x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int i = 0; i < 32; ++i) {
    const double r = w - x * std::exp(-w);  // f(w)/e^w
    const double wp1 = w + 1.0;
    const double step = r / (wp1 - 0.5 * r * (w + 2.0) / wp1);
    w -= step;
    if (std::fabs(step) <= 1e-16 * (1.0 + std::fabs(w))) break;
  }
  return std::fmax(w, -1.0);
}

// Gamma on the positive axis.  The closed forms only ever evaluate it at
// 2/alpha + 1 in [4/3, 2], comfortably inside libm's accurate range.
inline double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

}  // namespace relaysec

#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

namespace relaysec::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  bool converged = false;
};

namespace detail {

// Gauss 7 / Kronrod 15 on [-1, 1]: {abscissa, gauss weight (0 when the node
// is Kronrod-only), kronrod weight}.  Negative abscissae by symmetry.
struct GkNode {
  double x, wg, wk;
};

inline constexpr GkNode kGk15[8] = {
    {0.991455371120812639206854697526329, 0.0, 0.022935322010529224963732008058970},
    {0.949107912342758524526189684047851, 0.129484966168869693270611432679082, 0.063092092629978553290700663189204},
    {0.864864423359769072789712788640926, 0.0, 0.104790010322250183839876322541518},
    {0.741531185599394439863864773280788, 0.279705391489276667901467771423780, 0.140653259715525918745189590510238},
    {0.586087235467691130294144838258730, 0.0, 0.169004726639267902826583426598550},
    {0.405845151377397166906606412076961, 0.381830050505118944950369775488975, 0.190350578064785409913256402421014},
    {0.207784955007898467600689403773245, 0.0, 0.204432940075298892414161999234649},
    {0.0, 0.417959183673469387755102040816327, 0.209482141084727828012999174891714},
};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment evaluate(F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double gauss = 0.0, kronrod = 0.0;
  for (const GkNode& n : kGk15) {
    double fsum;
    if (n.x == 0.0) {
      fsum = f(c);
    } else {
      fsum = f(c - h * n.x) + f(c + h * n.x);
    }
    gauss += n.wg * fsum;
    kronrod += n.wk * fsum;
  }
  gauss *= h;
  kronrod *= h;
  double err = std::pow(200.0 * std::fabs(kronrod - gauss), 1.5);
  err = std::fmax(err, 50.0 * 2.2e-16 * std::fabs(kronrod));  // roundoff floor
  return {lo, hi, kronrod, err};
}

}  // namespace detail

// Adaptive bisection to an absolute tolerance, always splitting the segment
// with the largest error estimate.  Runs out of budget gracefully: the best
// estimate and its error bound are still returned, with converged = false.
template <class F>
Result integrate(F&& f, double lo, double hi, double abs_tol, int max_segments = 2000) {
  if (!(hi >= lo)) throw std::invalid_argument("integrate: inverted interval");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");
  if (lo == hi) return {0.0, 0.0, true};

  std::priority_queue<detail::Segment> heap;
  heap.push(detail::evaluate(f, lo, hi));
  double total_value = heap.top().value;
  double total_error = heap.top().error;
  int segments = 1;
  while (total_error > abs_tol && segments < max_segments) {
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const detail::Segment left = detail::evaluate(f, worst.lo, mid);
    const detail::Segment right = detail::evaluate(f, mid, worst.hi);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  return {total_value, total_error, total_error <= abs_tol};
}

// Iterated 1-D rule for rectangles.  The inner tolerance is budgeted per unit
// of outer length so the inner contribution stays under half the total.
template <class F>
Result integrate_2d(F&& f, double x_lo, double x_hi, double y_lo, double y_hi,
                    double abs_tol, int max_segments = 4000) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate_2d: tolerance must be positive");
  const double width = x_hi - x_lo;
  if (!(width > 0.0) || !(y_hi > y_lo)) return {0.0, 0.0, true};

  const double inner_tol = abs_tol / (4.0 * width);
  double inner_error_max = 0.0;
  bool inner_ok = true;
  auto slice = [&](double x) {
    auto inner = integrate([&f, x](double y) { return f(x, y); }, y_lo, y_hi, inner_tol, max_segments);
    inner_ok = inner_ok && inner.converged;
    inner_error_max = std::fmax(inner_error_max, inner.error);
    return inner.value;
  };
  Result outer = integrate(slice, x_lo, x_hi, 0.5 * abs_tol, max_segments);

  Result out;
  out.value = outer.value;
  out.error = outer.error + width * inner_error_max;
  out.converged = outer.converged && inner_ok && out.error <= abs_tol;
  return out;
}

}  // namespace relaysec::quad

#pragma once

#include <algorithm>
#include <cmath>

namespace privgraphon::quadrature {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] with Richardson correction.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-11, int max_depth = 40) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Iterated adaptive integration over [x0,x1] x [y0,y1].
template <class F>
double integrate2(const F& f, double x0, double x1, double y0, double y1, double tol = 1e-10) {
  const double inner_tol = tol / std::max(1.0, 4.0 * (x1 - x0));
  auto inner = [&](double x) {
    return integrate([&](double y) { return f(x, y); }, y0, y1, inner_tol);
  };
  return integrate(inner, x0, x1, tol);
}

}  // namespace privgraphon::quadrature

#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "musielak/errors.hpp"

namespace musielak::detail {

struct QuadResult {
  double value;
  double error;
};

// Globally adaptive 15-point Gauss-Kronrod: always split the panel with the
// largest error. Boost's own adaptive driver (1.74) reports the leaf errors on
// the reference interval, so only its single-panel rule is used here.
template <class F>
QuadResult integrate_gk15(F&& f, double a, double b, double rel_tol, std::size_t max_panels = 4000) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    double err = 0, l1 = 0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    return Panel{lo, hi, v, err * 0.5 * (hi - lo), l1};
  };
  std::priority_queue<Panel> heap;
  heap.push(eval(a, b));
  double value = heap.top().value, error = heap.top().error, l1 = heap.top().l1;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (error > rel_tol * std::abs(value) && error > 50 * eps * l1) {
    if (heap.size() >= max_panels || !std::isfinite(value))
      throw NumericalError("quadrature: panel budget exhausted");
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) throw NumericalError("quadrature: panel too narrow");
    Panel lp = eval(worst.a, mid), rp = eval(mid, worst.b);
    value += lp.value + rp.value - worst.value;
    error += lp.error + rp.error - worst.error;
    l1 += lp.l1 + rp.l1 - worst.l1;
    heap.push(lp);
    heap.push(rp);
  }
  // re-sum to drop cancellation from the running updates
  value = 0, error = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

}  // namespace musielak::detail

#pragma once

// Safeguarded Newton for increasing scalar functions. Used by the Phi
// inverse, the Luxemburg norm and the conjugate, which all reduce to
// "find y with g(y) = 0, g increasing, g' available".

#include <cmath>
#include <string>
#include <utility>

#include "musielak/errors.hpp"

namespace musielak::detail {

struct RootResult {
  double x;
  double residual;
  int iterations;
};

/// f(x) returns {value, derivative}; value must be increasing in x.
/// Stops when |value| <= ftol(x) or the bracket is narrower than xtol.
/// The bracket is found by stepping from x0 with doubling steps.
template <class F, class Tol>
RootResult solve_increasing(F&& f, double x0, Tol&& ftol, double xtol, int max_iter,
                            const char* what) {
  auto [v0, d0] = f(x0);
  int it = 0;
  if (std::abs(v0) <= ftol(x0)) return {x0, v0, 0};

  double lo, hi, vlo, vhi;
  double step = 1.0;
  if (std::isfinite(d0) && d0 > 0) step = std::max(std::min(std::abs(v0 / d0) * 1.5, 64.0), 1e-8);
  if (v0 < 0) {
    lo = x0, vlo = v0;
    double x = x0;
    while (true) {
      x += step;
      auto [v, d] = f(x);
      if (++it > max_iter)
        throw NumericalError(std::string(what) + ": no upper bracket found");
      if (std::abs(v) <= ftol(x)) return {x, v, it};
      if (v > 0) { hi = x, vhi = v; break; }
      lo = x, vlo = v;
      step *= 2.0;
    }
  } else {
    hi = x0, vhi = v0;
    double x = x0;
    while (true) {
      x -= step;
      auto [v, d] = f(x);
      if (++it > max_iter)
        throw NumericalError(std::string(what) + ": no lower bracket found");
      if (std::abs(v) <= ftol(x)) return {x, v, it};
      if (v < 0) { lo = x, vlo = v; break; }
      hi = x, vhi = v;
      step *= 2.0;
    }
  }

  // secant guess from the bracket to start
  double x = lo - vlo * (hi - lo) / (vhi - vlo);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  double prev_width = hi - lo;
  int slow = 0;
  while (it++ < max_iter) {
    auto [v, d] = f(x);
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite value");
    if (std::abs(v) <= ftol(x)) return {x, v, it};
    if (v < 0) lo = x, vlo = v; else hi = x, vhi = v;
    const double width = hi - lo;
    if (width <= xtol * std::max(1.0, std::abs(x))) return {x, v, it};

    double xn = (std::isfinite(d) && d > 0) ? x - v / d : lo - 1.0;
    slow = width > 0.5 * prev_width ? slow + 1 : 0;
    // bisect when Newton leaves the bracket or the bracket stops shrinking
    if (!(xn > lo && xn < hi) || slow >= 3) {
      xn = 0.5 * (lo + hi);
      slow = 0;
    }
    prev_width = width;
    x = xn;
  }
  throw NumericalError(std::string(what) + ": no convergence in bracket [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace musielak::detail

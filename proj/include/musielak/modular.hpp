#pragma once

#include <functional>

#include "musielak/grid.hpp"
#include "musielak/phi_core.hpp"

namespace musielak {

struct NormResult {
  double value = 0.0;
  double modular_at_value = 0.0;  // modular of u/value, ~1 unless value == 0
  int iterations = 0;
};

/// sum_i w_i phi(x_i, |u_i|) with the grid's trapezoid volume weights.
double modular_rho(const PhiSpec& spec, const GridFunction& u);

/// rho_H(|grad u|) + rho_H(|u|) with H = t^p + mu t^q.
double modular_sobolev(const ExponentField& field, const GridFunction& u);

/// Boundary modular: facet weights over the boundary nodes.
double boundary_modular(const PhiSpec& spec, const GridFunction& u);

NormResult luxemburg_norm(const PhiSpec& spec, const GridFunction& u, double tol = 1e-12);
NormResult sobolev_norm(const ExponentField& field, const GridFunction& u, double tol = 1e-12);
NormResult boundary_norm(const PhiSpec& spec, const GridFunction& u, double tol = 1e-12);

/// Luxemburg norm for an arbitrary modular given as a callback. eval(lambda)
/// returns {rho(u/lambda), d rho(u/lambda) / d log lambda}. rho_at_one is
/// rho(u) and [lo, hi] the growth exponent range of the Phi-function; they
/// only seed the bracket.
NormResult norm_from_modular(const std::function<std::pair<double, double>(double)>& eval,
                             double rho_at_one, double lo, double hi, double tol);

}  // namespace musielak

#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's root finders or quadrature.

#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

/// Inverse of t^p + mu t^q (normalized: t (1+mu) below 1) by bisection.
double h_inverse(double p, double q, double mu, double s, bool normalized = false);

/// int_0^s H^{-1}(tau) tau^{-(N+1)/N} dtau by composite Simpson with
/// `panels` panels after tau = s sigma^m (m = p* raw, N/(N-1) normalized).
double conjugate_inverse(int N, double p, double q, double mu, double s, long panels = 1000000,
                         bool normalized = false);

/// Luxemburg norm of sum_i w_i phi_i(|u_i| / lambda) = 1 by 200 bisection steps.
double luxemburg(const std::function<double(double)>& rho_of_lambda);

/// Dense Newton on the 1D P1 double-phase Dirichlet energy on [0,1] with n
/// nodes, constant p, q, mu and f. Returns all n nodal values.
std::vector<double> newton_1d_dirichlet(std::size_t n, double p, double q, double mu, double f,
                                        double tol = 1e-13);

}  // namespace oracle

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "musielak/grid.hpp"
#include "musielak/phi_core.hpp"

namespace musielak {

enum class BoundaryCondition { DirichletZero, Neumann };

std::string to_string(BoundaryCondition bc);
BoundaryCondition boundary_condition_from_string(const std::string& s);

struct SolverOptions {
  double grad_tol = 1e-8;  // on max_i |dE/du_i| / w_i
  std::size_t max_iter = 200000;
  double eps_reg = 1e-12;  // |grad u|^2 + eps inside the powers
  std::size_t memory = 20;  // L-BFGS pairs
};

/// Minimize  sum_T |T| [(|Du|^2+eps)^{p/2} - eps^{p/2}]/p + mu [..q..]/q
///           - sum_i w_i f_i u_i  (- sum_i s_i g_i u_i for Neumann)
/// over P1 functions on the Kuhn triangulation of the grid. p, q, mu on a
/// simplex are the vertex means of the nodal field.
struct ProblemSpec {
  FieldPtr field;
  GridFunction f;
  std::optional<GridFunction> g;  // boundary flux, Neumann only
  BoundaryCondition bc = BoundaryCondition::DirichletZero;
  SolverOptions options;

  /// Throws DimensionError for mismatched nodes, HypothesisError unless
  /// 1 < p <= q and mu >= 0, DomainError for non-finite data and
  /// ContractError for Neumann data with nonzero total load.
  void validate() const;
};

/// Throws ContractError when u is nonzero on the boundary of a Dirichlet problem.
double energy(const ProblemSpec& spec, const GridFunction& u);

/// dE/du_i at every node; zero on the boundary for Dirichlet problems.
GridFunction energy_gradient(const ProblemSpec& spec, const GridFunction& u);

struct SolveReport {
  bool converged = false;
  std::size_t iterations = 0;
  double grad_norm = 0;  // scaled, as in the stop test
  double energy = 0;
  bool energy_monotone = true;  // over accepted steps
  std::size_t restarts = 0;
  std::string message;
};

struct Solution {
  GridFunction u;
  SolveReport report;
};

/// L-BFGS with Armijo backtracking. Energy differences in the line search are
/// evaluated elementwise so the test stays meaningful near roundoff. Neumann
/// solutions are returned with zero weighted mean. Hitting max_iter is
/// reported, not thrown.
Solution solve(const ProblemSpec& spec, std::optional<GridFunction> initial = std::nullopt);

/// max over the nodal hat functions phi_i of free nodes of
/// |int A(grad u).grad phi_i - int f phi_i - int_G g phi_i| / int phi_i.
double weak_residual(const ProblemSpec& spec, const GridFunction& u);

/// Same for an arbitrary basis (P1 interpolants), scaled by sum_i w_i |phi_i|.
/// Basis functions must vanish on the boundary for Dirichlet problems.
double weak_residual(const ProblemSpec& spec, const GridFunction& u,
                     const std::vector<GridFunction>& basis);

}  // namespace musielak

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "musielak/grid.hpp"
#include "musielak/phi_core.hpp"

namespace musielak {

// ---- geometric recursion Z_{n+1} <= K b^n (Z_n^{1+mu1} + Z_n^{1+mu2}) ----

struct RecursionParams {
  double K = 1;
  double b = 2;
  double mu1 = 1;
  double mu2 = 1;
  /// Throws DomainError unless K > 0, b > 1, 0 < mu1 <= mu2.
  void validate() const;
};

/// The two admissible seed bounds, also as logarithms (they underflow easily).
struct Thresholds {
  double T1;
  double T2;
  double log_T1;
  double log_T2;
  double best() const { return T1 > T2 ? T1 : T2; }
  double log_best() const { return log_T1 > log_T2 ? log_T1 : log_T2; }
};

Thresholds recursion_thresholds(const RecursionParams& p);

/// log of min(1, (2K)^{-1/mu1} b^{-1/mu1^2} b^{-n/mu1}).
double log_decay_envelope(const RecursionParams& p, std::size_t n);

struct RecursionTrace {
  std::vector<double> Z;      // Z_0..Z_m (capped at kSentinel on divergence)
  std::vector<double> log_Z;  // -inf for zero entries
  std::optional<std::size_t> n0;  // first n with Z_n <= 1
  Thresholds thresholds{};
  bool admissible = false;  // Z_0 below one of the thresholds
  bool divergent = false;
  bool envelope_ok = false;  // Z_n <= envelope for all recorded n >= n0
  bool decays() const { return !divergent && n0.has_value() && envelope_ok; }
};

inline constexpr double kSentinel = 1e300;

/// Worst-case iteration with equality, in log space. Divergence (Z above
/// kSentinel) stops the trace and is flagged, it does not throw.
RecursionTrace iterate_recursion(double Z0, const RecursionParams& p, std::size_t n_max);

/// Least-squares K, b from consecutive measured pairs with mu1, mu2 fixed:
/// log Z_{n+1} - log(Z_n^{1+mu1} + Z_n^{1+mu2}) = log K + n log b.
/// Pairs with a zero entry are skipped; needs 2 usable pairs.
RecursionParams fit_recursion(const std::vector<double>& Z, double mu1, double mu2);

// ---- truncations of a grid function ----

struct LevelSet {
  std::vector<std::size_t> nodes;           // u > kappa
  double measure = 0;                       // volume weights
  std::vector<std::size_t> boundary_nodes;  // boundary nodes with u > kappa
  double boundary_measure = 0;              // facet weights
};

LevelSet level_set(const GridFunction& u, double kappa);

/// kappa_* (2 - 2^{-n}).
double kappa_sequence(double kappa_star, std::size_t n);

enum class Regime { SubcriticalD, SubcriticalN, CriticalD, CriticalN };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);
inline bool is_neumann(Regime r) { return r == Regime::SubcriticalN || r == Regime::CriticalN; }
inline bool is_critical(Regime r) { return r == Regime::CriticalD || r == Regime::CriticalN; }

/// Exponent data for the truncated energies. Subcritical regimes use
/// Psi = t^r + mu^{s/q} t^s inside and, for Neumann, Upsilon = t^l +
/// mu^{h/q} t^h on the boundary. Critical regimes use H(|grad u|) + G* inside
/// and T* on the boundary.
struct TruncationSpec {
  FieldPtr field;
  std::vector<double> r, s;  // subcritical interior
  std::vector<double> l, h;  // subcritical boundary (Neumann)

  /// Midpoints of the admissible windows (p, p*), (q, q*), (p, p_*), (q, q_*).
  static TruncationSpec midpoint(FieldPtr f);
};

struct IterationEnergy {
  Regime regime;
  std::size_t n;
  double kappa_n;
  double Z;  // interior term
  double Y;  // boundary term (0 for Dirichlet regimes)
  double X;  // Z + Y
  LevelSet level;
};

/// Throws HypothesisError when the spec lacks the exponents of the regime or
/// they leave their windows.
IterationEnergy truncation_energy(const GridFunction& u, const TruncationSpec& spec, Regime regime,
                                  double kappa_star, std::size_t n);

// ---- constants of the a priori bound ----

struct BoundConstants {
  double C = 1;     // prefactor of the final bound
  double tau1 = 1;  // exponents of the final bound
  double tau2 = 1;
  double alpha2 = 1, alpha3 = 1, beta = 1, gamma = 1;  // structure constants, recorded
  double C13 = 1;  // recursion prefactor
  double delta1 = 1, delta2 = 1;
  double mu1 = 1, mu2 = 1;
  double b = 2;
  /// Throws DomainError unless all positive, delta1 <= delta2, mu1 <= mu2, b > 1.
  void validate() const;
};

/// gamma_i, eps, mu_i, b, delta_i from global exponent ranges of p, q, r, s;
/// C13 and the structure constants are left at their configured values.
/// tau1 = delta1/mu2, tau2 = delta2/mu1. Needs p+ < r-, q+ < s-,
/// r+ < (p*)-, s+ < (q*)-.
BoundConstants derive_recursion_constants(const ExponentField& f, double r_min, double r_max,
                                          double s_min, double s_max, BoundConstants base = {});

struct KappaStar {
  double value = 0;
  bool degenerate = false;  // zero modular
};

/// max{(4C13)^{1/mu1}, (4C13)^{1/mu2}} b^{(1/mu1)(1/delta1 + (delta2-delta1)/delta2)}
///   * max{I^{delta1/mu2}, I^{delta2/mu1}},  I = int Psi(x, |u|).
KappaStar kappa_star_dirichlet(double psi_modular, const BoundConstants& c);

/// Both sufficient conditions on kappa_* that make the seed admissible;
/// returned as log-slacks (>= 0 when satisfied).
struct KappaConditions {
  double slack1;
  double slack2;
  bool ok(double tol = 1e-12) const { return slack1 >= -tol && slack2 >= -tol; }
};
KappaConditions kappa_conditions(double kappa, double psi_modular, const BoundConstants& c);

/// C max{N^{tau1}, N^{tau2}} with N = ||u||_Psi (+ ||u||_Upsilon for Neumann).
double bound_estimate(double norm_psi, std::optional<double> norm_upsilon, const BoundConstants& c,
                      Regime regime);

/// C and tau chosen so that bound_estimate(||u||_Psi) >= 2 kappa_star_dirichlet
/// via int Psi <= max{||u||^{r-}, ||u||^{s+}}.
BoundConstants dirichlet_bound_constants(BoundConstants c, double r_min, double s_max);

// ---- empirical iteration on a grid function ----

struct InvariantReport {
  double min_est_u_slack = 0;    // min over steps/nodes of (2^{n+2}-1)(u-k_n) - u, relative
  double min_measure_slack = 0;  // min of bound - |A_{k_{n+1}}|, relative to the bound
  double min_boundary_measure_slack = 0;
  bool monotone = true;  // Z_{n+1} <= Z_n, Y_{n+1} <= Y_n
  bool chebyshev = true;  // Z_n = 0 implies |A_{k_{n+1}}| = 0
  bool ok(double tol = 1e-9) const {
    return monotone && chebyshev && min_est_u_slack >= -tol && min_measure_slack >= -tol &&
           min_boundary_measure_slack >= -tol;
  }
};

/// Runs the truncations at kappa_star for n = 0..n_max and checks the
/// pointwise, measure and monotonicity invariants at every step.
struct KappaRun {
  double kappa_star = 0;
  std::vector<IterationEnergy> steps;
  InvariantReport invariants;
  double entry = 0;  // int_{A_kappa*} H(|grad u|) + H(|u|) + G*(|u|)
  bool entry_below_one = false;
  bool decays = false;  // final X below kDecayTol
};

inline constexpr double kDecayTol = 1e-12;

KappaRun run_kappa(const GridFunction& u, const TruncationSpec& spec, Regime regime,
                   double kappa_star, std::size_t n_max);

struct EmpiricalReport {
  std::optional<KappaRun> chosen;  // smallest passing candidate
  std::size_t candidates_tried = 0;
  double esssup = 0;  // max over nodes of u
  bool bound_ok = false;  // esssup <= 2 kappa_* (+ one-cell tolerance)
  std::string diagnostics;
};

/// Geometric grid 10^{-8} .. 10^{8}, 20 points per decade.
std::vector<double> default_kappa_grid();

/// Smallest candidate whose energies decay below kDecayTol within n_max
/// steps. Decay is monotone in kappa_* so the grid is bisected.
EmpiricalReport empirical_iteration(const GridFunction& u, const TruncationSpec& spec, Regime regime,
                                    std::vector<double> kappa_grid = {}, std::size_t n_max = 64);

/// Same for u and -u.
struct TwoSidedReport {
  EmpiricalReport upper;
  EmpiricalReport lower;  // run on -u
  bool pass() const { return upper.chosen && lower.chosen && upper.bound_ok && lower.bound_ok; }
};
TwoSidedReport empirical_iteration_two_sided(const GridFunction& u, const TruncationSpec& spec,
                                             Regime regime, std::vector<double> kappa_grid = {},
                                             std::size_t n_max = 64);

}  // namespace musielak

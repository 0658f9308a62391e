#pragma once

#include <memory>
#include <string>
#include <vector>

#include "musielak/grid.hpp"
#include "musielak/phi_core.hpp"

namespace musielak {

/// Weight mu used by the dilation experiments: mu = 1 or mu = |x|.
enum class WeightMode { One, Radial };

std::string to_string(WeightMode m);
WeightMode weight_mode_from_string(const std::string& s);

/// Exponents of B(x,t) = t^r + mu(x)^alpha t^s.
struct BParams {
  double r;
  double s;
  double alpha;
};

/// exp(-1/(1-|x|^2)) inside the unit ball, 0 outside.
GridFunction bump(std::shared_ptr<const GridDomain> d);

/// v(x) = u(lambda x), multilinear interpolation between nodes and 0 where
/// lambda x leaves the box. u must vanish on the boundary, lambda >= 1.
GridFunction scale_function(const GridFunction& u, double lambda);

/// Nodal weight mu for the given mode.
std::vector<double> weight_values(const GridDomain& d, WeightMode m);

/// The four integral terms of the dilation inequality for one function:
///   lhs:  (int |v|^r)^{1/r} + (int mu^alpha |v|^s)^{1/s}
///   rhs:  (int |grad v|^p)^{1/p} + (int mu |grad v|^q)^{1/q}
/// plus the Luxemburg norm of v for B and the check
///   (A+B)/2 <= ||v||_B <= 2^{1/min(r,s)} (A+B).
/// Variable p, q enter pointwise; the outer root uses p^-, q^-.
struct EmbeddingSides {
  double lhs_r = 0;
  double lhs_s = 0;
  double rhs_p = 0;
  double rhs_q = 0;
  double norm = 0;
  bool sandwich_ok = true;
  double lhs() const { return lhs_r + lhs_s; }
  double rhs() const { return rhs_p + rhs_q; }
};

EmbeddingSides embedding_sides(const GridFunction& u, const ExponentField& field, const BParams& b,
                               WeightMode w);

struct SlopeFit {
  std::string quantity;
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // rms in log coordinates
  double predicted = 0;
  bool reliable = true;  // residual <= kFitResidual
};

inline constexpr double kFitResidual = 0.05;

struct ScalingExperiment {
  GridFunction base;
  std::vector<double> lambdas;
  WeightMode weight = WeightMode::One;
  std::shared_ptr<const ExponentField> field;
  BParams b{2, 2, 1};
  std::vector<EmbeddingSides> sides;  // one per lambda
  std::vector<SlopeFit> slopes;
};

/// {1, 2, 4, ...} up to 16, dropping lambdas whose support radius 1/lambda
/// spans fewer than 8 cells.
std::vector<double> default_lambdas(const GridDomain& d);

/// Evaluates embedding_sides for every lambda, one after the other (each
/// evaluation is parallel over nodes).
ScalingExperiment run_scaling(GridFunction base, std::shared_ptr<const ExponentField> field,
                              BParams b, WeightMode w, std::vector<double> lambdas = {});

/// Least-squares slopes of log quantity against log lambda for the four
/// terms lhs_r, lhs_s, rhs_p, rhs_q, with the exact slopes for constant
/// exponents. Needs >= 4 lambdas spanning a decade.
std::vector<SlopeFit> exponent_scan(const ScalingExperiment& e);

/// Ordinary least squares y = a + b x; throws NumericalError for zero
/// variance in x.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct OptimalityReport {
  double p_star = 0;
  double q_star = 0;
  bool r_ok = false;      // r <= p*
  bool s_ok = false;      // s <= q*
  bool alpha_ok = false;  // alpha >= q*/q
  double epsilon = 0;     // 1 + 1/N - q/p
  double alpha_threshold = 0;  // s/q - N^2 eps/(N-q)
  bool all() const { return r_ok && s_ok && alpha_ok; }
};

/// Necessary conditions for the embedding into B; needs 1 < p < q < N.
/// Comparisons allow a relative 1e-12 so equality cases pass.
OptimalityReport optimality_check(int N, double p, double q, double r, double s, double alpha);

}  // namespace musielak

#pragma once

#include <cstddef>
#include <vector>

#include "musielak/phi_core.hpp"

namespace musielak {

/// Which H the conjugate is built from. Raw is t^p + mu t^q; Normalized is
/// t H(1) below t = 1 and H above.
enum class ConjugateBase { Raw, Normalized };

/// Sobolev conjugate H_* of a field with H3.
///
/// The inverse is H_*^{-1}(s) = int_0^s H^{-1}(tau) tau^{-(N+1)/N} dtau.
/// Substituting tau = H(w) turns it into
///   J(W) = int_0^W w H'(w) H(w)^{-1-1/N} dw,   W = H^{-1}(s),
/// which needs no inner inversion. Near 0 the integrand behaves like
/// w^{-a/N} (a = p, or 1 for the normalized base); w = W0 sigma^{N/(N-a)}
/// removes that singularity. The rest is integrated in log w with breaks at
/// the phase change mu w^{q-p} = 1 and, for the normalized base, at w = 1.
class Conjugate {
 public:
  /// Throws HypothesisError unless the field satisfies H3. With
  /// require_ratio = false the cap (q/p)^+ < 1+1/N is waived; the integral
  /// and the bounds below only use 1 < p < q < N.
  explicit Conjugate(FieldPtr field, ConjugateBase base = ConjugateBase::Raw,
                     bool require_ratio = true);

  const ExponentField& field() const { return *field_; }
  ConjugateBase base() const { return base_; }

  /// H_*^{-1}(x, s).
  double inverse(std::size_t node, double s, double tol = 1e-12) const;
  /// H_*(x, t).
  double value(std::size_t node, double t, double tol = 1e-12) const;
  /// log H_*(x, t) for t > 0 (safe when H_* over/underflows).
  double log_value(std::size_t node, double t, double tol = 1e-12) const;

  /// J(W) and its quadrature error estimate.
  struct Integral {
    double value;
    double error;
  };
  Integral integral(std::size_t node, double W, double tol) const;

  /// log of sup over nodes of (q*)^{q*}, the constant in the domination bounds.
  double log_qstar_power_sup() const { return log_qstar_power_sup_; }
  /// The H this conjugate is built from.
  const PhiSpec& phi() const { return H_; }

 private:
  double j(std::size_t node, double w) const;  // integrand
  double solve_upper_limit(std::size_t node, double t, double tol) const;

  FieldPtr field_;
  ConjugateBase base_;
  PhiSpec H_;
  double log_qstar_power_sup_;
};

/// One-shot helpers; each call validates H3.
double conjugate_inverse(const ExponentField& field, std::size_t node, double s,
                         double tol = 1e-12, ConjugateBase base = ConjugateBase::Raw);
double conjugate(const ExponentField& field, std::size_t node, double t, double tol = 1e-12,
                 ConjugateBase base = ConjugateBase::Raw);

struct ConjugateTable {
  std::size_t node;
  std::vector<double> s;
  std::vector<double> inverse;   // H_*^{-1}(x, s)
  std::vector<double> accuracy;  // quadrature error estimate
};

ConjugateTable conjugate_table(const Conjugate& c, std::size_t node, std::vector<double> s,
                               double tol = 1e-12);

struct BoundSample {
  std::size_t node;
  double t;
};

/// Slack of a bound A <= B is (B - A) / max(A, B), 0 when both vanish.
/// Negative means violated.
struct BoundRow {
  std::size_t node;
  double t;
  double conjugate;
  std::vector<double> slack;
};

struct BoundReport {
  std::vector<std::string> names;
  std::vector<BoundRow> rows;
  double min_slack = 1.0;
  bool pass = true;
};

double relative_slack(double log_lhs, double log_rhs);

/// H_* >= (p*)^{-p*} t^{p*};  H_* >= (q*)^{-q*} mu^{q*/q} t^{q*};
/// G* <= 2 sup (q*)^{q*} H_*.
BoundReport verify_conjugate_bounds(const Conjugate& c, const std::vector<BoundSample>& samples,
                                    double tol = 1e-9);
/// T* <= 2 {sup (q*)^{q*}}^{(N-1)/N} H_*^{(N-1)/N}.
BoundReport verify_trace_bound(const Conjugate& c, const std::vector<BoundSample>& samples,
                               double tol = 1e-9);

}  // namespace musielak

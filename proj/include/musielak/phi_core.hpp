#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "musielak/grid.hpp"

namespace musielak {

/// Exponent data (p, q, mu) sampled on nodes, plus the dimension N.
///
/// A vector of length 1 is a constant field and broadcasts to any node
/// index. Otherwise all non-constant vectors must have the same length.
/// N is the dimension entering the critical exponents; it is not tied to the
/// dimension of the grid the field is later used on.
struct ExponentField {
  int N = 2;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> mu;
  std::optional<double> lipschitz_bound;

  ExponentField() = default;
  ExponentField(int N_, std::vector<double> p_, std::vector<double> q_,
                std::vector<double> mu_, std::optional<double> lip = std::nullopt);

  static ExponentField constant(int N, double p, double q, double mu);

  /// Number of nodes (1 for a fully constant field).
  std::size_t size() const;
  bool is_constant() const { return size() == 1; }
  /// Throws DimensionError unless the field broadcasts to n nodes.
  void require_nodes(std::size_t n) const;

  double p_at(std::size_t i) const { return p.size() == 1 ? p[0] : p[i]; }
  double q_at(std::size_t i) const { return q.size() == 1 ? q[0] : q[i]; }
  double mu_at(std::size_t i) const { return mu.size() == 1 ? mu[0] : mu[i]; }

  double p_min() const;
  double p_max() const;
  double q_min() const;
  double q_max() const;
  double mu_max() const;
};

using FieldPtr = std::shared_ptr<const ExponentField>;

struct CriticalExponents {
  double p_star;   // Np/(N-p)
  double q_star;   // Nq/(N-q)
  double p_lower;  // (N-1)p/(N-p)
  double q_lower;  // (N-1)q/(N-q)
};

/// r* = N r/(N-r). Throws SingularityError for r >= N.
double sobolev_exponent(int N, double r);
/// r_* = (N-1) r/(N-r). Throws SingularityError for r >= N.
double trace_exponent(int N, double r);

CriticalExponents critical_exponents(const ExponentField& field, std::size_t node);

enum class Hypothesis { H1, H2, H3 };

struct Violation {
  std::size_t node;  // npos for global conditions
  std::string condition;
};

struct ValidationReport {
  bool pass = true;
  Hypothesis level = Hypothesis::H1;
  std::vector<Violation> violations;
};

/// Checks the chosen hypothesis level node by node. With a grid and a
/// lipschitz_bound the difference quotients of p, q, mu along grid edges are
/// also checked against the bound.
ValidationReport validate_hypotheses(const ExponentField& field, Hypothesis level,
                                     const GridDomain* grid = nullptr);

namespace conditions {
inline constexpr const char* kDimension = "N >= 2";
inline constexpr const char* kFinite = "p, q, mu finite";
inline constexpr const char* kPAboveOne = "1 < p(x)";
inline constexpr const char* kPBelowN = "p(x) < N";
inline constexpr const char* kPBelowQ = "p(x) < q(x)";
inline constexpr const char* kMuNonneg = "mu(x) >= 0";
inline constexpr const char* kQBelowPStar = "q(x) < p*(x)";
inline constexpr const char* kQBelowN = "q(x) < N";
inline constexpr const char* kRatio = "(q/p)^+ < 1+1/N";
inline constexpr const char* kLipschitz = "Lipschitz bound";
}  // namespace conditions

std::string to_string(Hypothesis h);
Hypothesis hypothesis_from_string(const std::string& s);

enum class PhiKind { H, H1Normalized, GStar, TStar, Psi, Upsilon, B };

std::string to_string(PhiKind k);
PhiKind phi_kind_from_string(const std::string& s);

/// Subcritical: strict inequalities against the critical exponents.
/// Critical: equality allowed.
enum class CriticalMode { Subcritical, Critical };

/// At a fixed node every kind except H1Normalized has the form
///   phi(t) = t^a + w t^b.
struct PowerPair {
  double a;
  double b;
  double w;
};

/// One generalized Phi-function over an exponent field.
///
/// Auxiliary exponents (length 1 broadcasts):
///   Psi:     first = r, second = s
///   Upsilon: first = l, second = h
///   B:       first = r, second = s, alpha = exponent of mu
class PhiSpec {
 public:
  static PhiSpec H(FieldPtr f);
  static PhiSpec H1Normalized(FieldPtr f);
  static PhiSpec GStar(FieldPtr f);
  static PhiSpec TStar(FieldPtr f);
  static PhiSpec Psi(FieldPtr f, std::vector<double> r, std::vector<double> s,
                     CriticalMode mode = CriticalMode::Subcritical);
  static PhiSpec Upsilon(FieldPtr f, std::vector<double> l, std::vector<double> h,
                         CriticalMode mode = CriticalMode::Subcritical);
  static PhiSpec B(FieldPtr f, std::vector<double> r, std::vector<double> s,
                   std::vector<double> alpha);

  PhiKind kind() const { return kind_; }
  const ExponentField& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }
  CriticalMode mode() const { return mode_; }
  std::size_t size() const;

  double first_at(std::size_t i) const { return bc(first_, i); }
  double second_at(std::size_t i) const { return bc(second_, i); }
  double alpha_at(std::size_t i) const { return bc(alpha_, i); }

  /// Throws for H1Normalized, which is piecewise.
  PowerPair terms(std::size_t node) const;

  double operator()(std::size_t node, double t) const;
  /// d/dt phi(node, t); right derivative at the kink of H1Normalized.
  double derivative(std::size_t node, double t) const;
  /// log phi(node, t) for t > 0, evaluated without forming phi (no overflow
  /// for huge exponents).
  double log_value(std::size_t node, double t) const;
  /// t phi'(t) / phi(t), the logarithmic derivative.
  double elasticity(std::size_t node, double t) const;

  /// Smallest and largest exponent appearing over all nodes, the growth
  /// range that brackets phi(ct)/phi(t) between c^lo and c^hi.
  std::pair<double, double> exponent_range() const;

 private:
  PhiSpec(PhiKind k, FieldPtr f) : kind_(k), field_(std::move(f)) {}
  static double bc(const std::vector<double>& v, std::size_t i) {
    return v.empty() ? 0.0 : (v.size() == 1 ? v[0] : v[i]);
  }

  PhiKind kind_;
  FieldPtr field_;
  std::vector<double> first_;
  std::vector<double> second_;
  std::vector<double> alpha_;
  CriticalMode mode_ = CriticalMode::Subcritical;
};

/// Throws DomainError for t < 0 or non-finite t.
double eval_phi(const PhiSpec& spec, std::size_t node, double t);

/// t >= 0 with |phi(t) - s| <= tol * max(1, s).
double phi_inverse(const PhiSpec& spec, std::size_t node, double s, double tol = 1e-12);

}  // namespace musielak

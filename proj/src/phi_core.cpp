#include "musielak/phi_core.hpp"

#include <algorithm>
#include <cmath>

#include "musielak/detail/roots.hpp"
#include "musielak/errors.hpp"

namespace musielak {

namespace {

double vmin(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double vmax(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// log(e^x + e^y) without overflow
double log_add(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

std::size_t common_size(std::initializer_list<const std::vector<double>*> vs) {
  std::size_t n = 1;
  for (const auto* v : vs) {
    if (v->empty()) throw DimensionError("empty exponent array");
    if (v->size() == 1) continue;
    if (n == 1)
      n = v->size();
    else if (v->size() != n)
      throw DimensionError("exponent arrays have different node counts (" + std::to_string(n) +
                           " vs " + std::to_string(v->size()) + ")");
  }
  return n;
}

}  // namespace

ExponentField::ExponentField(int N_, std::vector<double> p_, std::vector<double> q_,
                             std::vector<double> mu_, std::optional<double> lip)
    : N(N_), p(std::move(p_)), q(std::move(q_)), mu(std::move(mu_)), lipschitz_bound(lip) {
  common_size({&p, &q, &mu});
}

ExponentField ExponentField::constant(int N, double p, double q, double mu) {
  return ExponentField(N, {p}, {q}, {mu});
}

std::size_t ExponentField::size() const { return common_size({&p, &q, &mu}); }

void ExponentField::require_nodes(std::size_t n) const {
  const std::size_t m = size();
  if (m != 1 && m != n)
    throw DimensionError("exponent field has " + std::to_string(m) + " nodes, grid has " +
                         std::to_string(n));
}

double ExponentField::p_min() const { return vmin(p); }
double ExponentField::p_max() const { return vmax(p); }
double ExponentField::q_min() const { return vmin(q); }
double ExponentField::q_max() const { return vmax(q); }
double ExponentField::mu_max() const { return vmax(mu); }

double sobolev_exponent(int N, double r) {
  if (!(r < N))
    throw SingularityError("critical exponent undefined for r=" + std::to_string(r) +
                           " >= N=" + std::to_string(N));
  return N * r / (N - r);
}

double trace_exponent(int N, double r) {
  if (!(r < N))
    throw SingularityError("trace exponent undefined for r=" + std::to_string(r) +
                           " >= N=" + std::to_string(N));
  return (N - 1) * r / (N - r);
}

CriticalExponents critical_exponents(const ExponentField& f, std::size_t node) {
  const double p = f.p_at(node), q = f.q_at(node);
  return {sobolev_exponent(f.N, p), sobolev_exponent(f.N, q), trace_exponent(f.N, p),
          trace_exponent(f.N, q)};
}

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H1: return "H1";
    case Hypothesis::H2: return "H2";
    case Hypothesis::H3: return "H3";
  }
  return "?";
}

Hypothesis hypothesis_from_string(const std::string& s) {
  if (s == "H1") return Hypothesis::H1;
  if (s == "H2") return Hypothesis::H2;
  if (s == "H3") return Hypothesis::H3;
  throw DomainError("unknown hypothesis level '" + s + "'");
}

ValidationReport validate_hypotheses(const ExponentField& f, Hypothesis level,
                                     const GridDomain* grid) {
  const std::size_t n = f.size();
  if (grid) f.require_nodes(grid->size());
  ValidationReport rep;
  rep.level = level;
  auto fail = [&](std::size_t node, const char* c) {
    rep.pass = false;
    rep.violations.push_back({node, c});
  };
  constexpr auto npos = static_cast<std::size_t>(-1);
  if (f.N < 2) fail(npos, conditions::kDimension);
  const double N = f.N;

  double ratio_max = 0.0;
  std::size_t ratio_node = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = f.p_at(i), q = f.q_at(i), mu = f.mu_at(i);
    if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(mu)) {
      // also covers "mu bounded" for H2
      fail(i, conditions::kFinite);
      continue;
    }
    if (!(p > 1)) fail(i, conditions::kPAboveOne);
    if (!(p < N)) fail(i, conditions::kPBelowN);
    if (!(p < q)) fail(i, conditions::kPBelowQ);
    if (!(mu >= 0)) fail(i, conditions::kMuNonneg);
    if (level == Hypothesis::H1) continue;
    if (p < N && !(q < N * p / (N - p))) fail(i, conditions::kQBelowPStar);
    if (level == Hypothesis::H2) continue;
    if (!(q < N)) fail(i, conditions::kQBelowN);
    if (p > 0 && q / p > ratio_max) ratio_max = q / p, ratio_node = i;
  }
  if (level == Hypothesis::H3 && n > 0 && !(ratio_max < 1.0 + 1.0 / N))
    fail(ratio_node, conditions::kRatio);

  if (level == Hypothesis::H3 && grid && f.lipschitz_bound && n > 1) {
    const double L = *f.lipschitz_bound;
    for (std::size_t i = 0; i < n; ++i) {
      auto idx = grid->multi_index(i);
      for (std::size_t a = 0; a < grid->dim(); ++a) {
        if (idx[a] + 1 >= grid->shape()[a]) continue;
        const std::size_t j = i + grid->stride(a);
        const double h = grid->spacing()[a];
        const double dq = std::max({std::abs(f.p_at(j) - f.p_at(i)), std::abs(f.q_at(j) - f.q_at(i)),
                                    std::abs(f.mu_at(j) - f.mu_at(i))}) / h;
        if (dq > L * (1 + 1e-12)) {
          fail(i, conditions::kLipschitz);
          goto lip_done;
        }
      }
    }
  lip_done:;
  }
  return rep;
}

std::string to_string(PhiKind k) {
  switch (k) {
    case PhiKind::H: return "H";
    case PhiKind::H1Normalized: return "H1";
    case PhiKind::GStar: return "G*";
    case PhiKind::TStar: return "T*";
    case PhiKind::Psi: return "Psi";
    case PhiKind::Upsilon: return "Upsilon";
    case PhiKind::B: return "B";
  }
  return "?";
}

PhiKind phi_kind_from_string(const std::string& s) {
  if (s == "H") return PhiKind::H;
  if (s == "H1" || s == "H1-normalized") return PhiKind::H1Normalized;
  if (s == "G*" || s == "GStar") return PhiKind::GStar;
  if (s == "T*" || s == "TStar") return PhiKind::TStar;
  if (s == "Psi") return PhiKind::Psi;
  if (s == "Upsilon") return PhiKind::Upsilon;
  if (s == "B") return PhiKind::B;
  throw DomainError("unknown Phi-function kind '" + s + "'");
}

PhiSpec PhiSpec::H(FieldPtr f) { return PhiSpec(PhiKind::H, std::move(f)); }
PhiSpec PhiSpec::H1Normalized(FieldPtr f) { return PhiSpec(PhiKind::H1Normalized, std::move(f)); }

PhiSpec PhiSpec::GStar(FieldPtr f) {
  PhiSpec s(PhiKind::GStar, std::move(f));
  for (std::size_t i = 0; i < s.field().size(); ++i) critical_exponents(s.field(), i);
  return s;
}

PhiSpec PhiSpec::TStar(FieldPtr f) {
  PhiSpec s(PhiKind::TStar, std::move(f));
  for (std::size_t i = 0; i < s.field().size(); ++i) critical_exponents(s.field(), i);
  return s;
}

namespace {

void check_window(const ExponentField& f, const std::vector<double>& a,
                  const std::vector<double>& b, bool trace, CriticalMode mode, const char* name) {
  const std::size_t n = common_size({&f.p, &f.q, &f.mu, &a, &b});
  auto at = [](const std::vector<double>& v, std::size_t i) { return v.size() == 1 ? v[0] : v[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = critical_exponents(f, i);
    const double lo1 = f.p_at(i), hi1 = trace ? c.p_lower : c.p_star;
    const double lo2 = f.q_at(i), hi2 = trace ? c.q_lower : c.q_star;
    const double x = at(a, i), y = at(b, i);
    bool ok = mode == CriticalMode::Subcritical
                  ? (lo1 < x && x < hi1 && lo2 < y && y < hi2)
                  : (x <= hi1 && y <= hi2 && x > 0 && y > 0);
    if (!ok)
      throw HypothesisError(std::string(name) + " exponents outside the admissible window at node " +
                            std::to_string(i));
  }
}

}  // namespace

PhiSpec PhiSpec::Psi(FieldPtr f, std::vector<double> r, std::vector<double> s, CriticalMode mode) {
  check_window(*f, r, s, false, mode, "Psi");
  PhiSpec p(PhiKind::Psi, std::move(f));
  p.first_ = std::move(r);
  p.second_ = std::move(s);
  p.mode_ = mode;
  return p;
}

PhiSpec PhiSpec::Upsilon(FieldPtr f, std::vector<double> l, std::vector<double> h,
                         CriticalMode mode) {
  check_window(*f, l, h, true, mode, "Upsilon");
  PhiSpec p(PhiKind::Upsilon, std::move(f));
  p.first_ = std::move(l);
  p.second_ = std::move(h);
  p.mode_ = mode;
  return p;
}

PhiSpec PhiSpec::B(FieldPtr f, std::vector<double> r, std::vector<double> s,
                   std::vector<double> alpha) {
  common_size({&f->p, &f->q, &f->mu, &r, &s, &alpha});
  for (auto* v : {&r, &s})
    for (double e : *v)
      if (!(e > 0)) throw DomainError("B exponents must be positive");
  for (double e : alpha)
    if (!(e >= 0)) throw DomainError("B weight exponent must be nonnegative");
  PhiSpec p(PhiKind::B, std::move(f));
  p.first_ = std::move(r);
  p.second_ = std::move(s);
  p.alpha_ = std::move(alpha);
  return p;
}

std::size_t PhiSpec::size() const {
  std::size_t n = field_->size();
  for (const auto* v : {&first_, &second_, &alpha_})
    if (v->size() > 1) n = v->size();
  return n;
}

PowerPair PhiSpec::terms(std::size_t i) const {
  const ExponentField& f = *field_;
  const double p = f.p_at(i), q = f.q_at(i), mu = f.mu_at(i);
  switch (kind_) {
    case PhiKind::H: return {p, q, mu};
    case PhiKind::GStar: {
      const double ps = sobolev_exponent(f.N, p), qs = sobolev_exponent(f.N, q);
      return {ps, qs, std::pow(mu, qs / q)};
    }
    case PhiKind::TStar: {
      const double pl = trace_exponent(f.N, p), ql = trace_exponent(f.N, q);
      return {pl, ql, std::pow(mu, ql / q)};
    }
    case PhiKind::Psi:
    case PhiKind::Upsilon: {
      const double s = second_at(i);
      return {first_at(i), s, std::pow(mu, s / q)};
    }
    case PhiKind::B: return {first_at(i), second_at(i), std::pow(mu, alpha_at(i))};
    case PhiKind::H1Normalized: break;
  }
  throw DomainError("normalized H is piecewise and has no single power pair");
}

namespace {

double pair_value(const PowerPair& t, double x) {
  return std::pow(x, t.a) + (t.w == 0 ? 0.0 : t.w * std::pow(x, t.b));
}
double pair_derivative(const PowerPair& t, double x) {
  double d = t.a * std::pow(x, t.a - 1);
  if (t.w != 0) d += t.w * t.b * std::pow(x, t.b - 1);
  return d;
}
double pair_log(const PowerPair& t, double x) {
  const double lx = std::log(x);
  if (t.w == 0) return t.a * lx;
  return log_add(t.a * lx, std::log(t.w) + t.b * lx);
}
double pair_elasticity(const PowerPair& t, double x) {
  if (t.w == 0) return t.a;
  // weights of the two terms in phi, computed in log space
  const double lx = std::log(x);
  const double la = t.a * lx, lb = std::log(t.w) + t.b * lx;
  const double m = std::max(la, lb);
  const double ea = std::exp(la - m), eb = std::exp(lb - m);
  return (t.a * ea + t.b * eb) / (ea + eb);
}

}  // namespace

double PhiSpec::operator()(std::size_t i, double t) const {
  if (kind_ == PhiKind::H1Normalized) {
    const PowerPair h{field_->p_at(i), field_->q_at(i), field_->mu_at(i)};
    return t <= 1.0 ? t * (1.0 + h.w) : pair_value(h, t);
  }
  return pair_value(terms(i), t);
}

double PhiSpec::derivative(std::size_t i, double t) const {
  if (kind_ == PhiKind::H1Normalized) {
    const PowerPair h{field_->p_at(i), field_->q_at(i), field_->mu_at(i)};
    return t < 1.0 ? 1.0 + h.w : pair_derivative(h, t);
  }
  return pair_derivative(terms(i), t);
}

double PhiSpec::log_value(std::size_t i, double t) const {
  if (kind_ == PhiKind::H1Normalized) {
    const PowerPair h{field_->p_at(i), field_->q_at(i), field_->mu_at(i)};
    return t <= 1.0 ? std::log(t) + std::log1p(h.w) : pair_log(h, t);
  }
  return pair_log(terms(i), t);
}

double PhiSpec::elasticity(std::size_t i, double t) const {
  if (kind_ == PhiKind::H1Normalized) {
    const PowerPair h{field_->p_at(i), field_->q_at(i), field_->mu_at(i)};
    return t < 1.0 ? 1.0 : pair_elasticity(h, t);
  }
  return pair_elasticity(terms(i), t);
}

std::pair<double, double> PhiSpec::exponent_range() const {
  double lo = INFINITY, hi = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    PowerPair t = kind_ == PhiKind::H1Normalized
                      ? PowerPair{field_->p_at(i), field_->q_at(i), field_->mu_at(i)}
                      : terms(i);
    lo = std::min({lo, t.a, t.b});
    hi = std::max({hi, t.a, t.b});
  }
  if (kind_ == PhiKind::H1Normalized) lo = 1.0;
  return {lo, hi};
}

double eval_phi(const PhiSpec& spec, std::size_t node, double t) {
  if (!(t >= 0) || !std::isfinite(t))
    throw DomainError("Phi-function argument must be a finite t >= 0, got " + std::to_string(t));
  if (node >= spec.size() && spec.size() != 1)
    throw DomainError("node index " + std::to_string(node) + " out of range");
  if (t == 0) return 0.0;
  return spec(node, t);
}

double phi_inverse(const PhiSpec& spec, std::size_t node, double s, double tol) {
  if (!(s >= 0) || !std::isfinite(s)) throw DomainError("phi_inverse needs finite s >= 0");
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  if (s == 0) return 0.0;
  const double ls = std::log(s);
  // in y = log t: g(y) = log phi(e^y) - log s, g'(y) = elasticity in [lo, hi]
  const auto [lo, hi] = spec.exponent_range();
  const double y0 = ls / (ls > 0 ? hi : lo);
  auto g = [&](double y) {
    const double t = std::exp(y);
    return std::pair{spec.log_value(node, t) - ls, spec.elasticity(node, t)};
  };
  // relative: |log phi - log s| <= tol/2 gives |phi - s| <= tol s <= tol max(1,s)
  const double ftol = 0.5 * tol;
  auto r = detail::solve_increasing(g, y0, [&](double) { return ftol; }, 1e-15, 400,
                                    "phi_inverse");
  return std::exp(r.x);
}

}  // namespace musielak

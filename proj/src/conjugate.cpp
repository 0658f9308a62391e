#include "musielak/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "musielak/detail/quadrature.hpp"
#include "musielak/detail/roots.hpp"
#include "musielak/errors.hpp"

namespace musielak {

namespace {


double quad_tol(double tol) { return std::max(0.01 * tol, 1e-15); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

Conjugate::Conjugate(FieldPtr field, ConjugateBase base, bool require_ratio)
    : field_(std::move(field)),
      base_(base),
      H_(base == ConjugateBase::Raw ? PhiSpec::H(field_) : PhiSpec::H1Normalized(field_)) {
  auto rep = validate_hypotheses(*field_, Hypothesis::H3);
  if (!require_ratio)
    std::erase_if(rep.violations, [](const Violation& v) { return v.condition == conditions::kRatio; });
  if (!rep.violations.empty())
    throw HypothesisError("Sobolev conjugate needs H3; violated: " + rep.violations.front().condition +
                          (rep.violations.front().node == static_cast<std::size_t>(-1)
                               ? std::string()
                               : " at node " + std::to_string(rep.violations.front().node)));
  log_qstar_power_sup_ = -INFINITY;
  for (std::size_t i = 0; i < field_->size(); ++i) {
    const double qs = critical_exponents(*field_, i).q_star;
    log_qstar_power_sup_ = std::max(log_qstar_power_sup_, qs * std::log(qs));
  }
}

double Conjugate::j(std::size_t i, double w) const {
  return H_.elasticity(i, w) * std::exp(-H_.log_value(i, w) / field_->N);
}

Conjugate::Integral Conjugate::integral(std::size_t i, double W, double tol) const {
  if (!(W >= 0) || !std::isfinite(W)) throw DomainError("conjugate: upper limit must be >= 0");
  if (W == 0) return {0.0, 0.0};
  const double N = field_->N;
  const double p = field_->p_at(i), q = field_->q_at(i), mu = field_->mu_at(i);

  std::vector<double> breaks;
  if (base_ == ConjugateBase::Normalized) breaks.push_back(1.0);
  if (mu > 0) {
    const double wc = std::exp(-std::log(mu) / (q - p));
    if (std::isfinite(wc) && wc > 0) breaks.push_back(wc);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double b) { return !(b < W); }),
               breaks.end());

  const double tq = quad_tol(tol);
  double total = 0.0, err_total = 0.0;

  // first piece [0, w0]: w = w0 sigma^m
  const double w0 = breaks.empty() ? W : breaks.front();
  const double a = base_ == ConjugateBase::Normalized ? 1.0 : p;
  // an integer multiple K of N/(N-a) keeps the leading part polynomial in sigma
  // and pushes the w^{q-p} correction to a high power of sigma
  double m = N / (N - a);
  if (mu > 0 && base_ == ConjugateBase::Raw)
    m *= std::clamp(std::ceil(4.0 / (m * (q - p))), 1.0, 16.0);
  const double lw0 = std::log(w0), lm = std::log(m);
  // log of w H'(w) H(w)^{-1-1/N} straight from log w: no denormal w, and the
  // two phases blend through a stable softplus
  const double lmu = mu > 0 ? std::log(mu) : -INFINITY;
  const double l1mu = std::log1p(mu);
  auto log_integrand = [&](double lw) {
    if (base_ == ConjugateBase::Normalized && lw < 0) return -(l1mu + lw) / N;
    double lh = p * lw, el = p;
    if (mu > 0) {
      const double x = (q - p) * lw + lmu;
      const double sp = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
      const double sg = x > 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x));
      lh += sp;
      el += (q - p) * sg;
    }
    return std::log(el) - lh / N;
  };
  auto f0 = [&](double sigma) {
    if (sigma <= 0) sigma = 1e-300;
    const double ls = std::log(sigma);
    return std::exp(log_integrand(lw0 + m * ls) + lw0 + lm + (m - 1) * ls);
  };
  auto piece = detail::integrate_gk15(f0, 0.0, 1.0, tq);
  total += piece.value;
  err_total += piece.error;

  // remaining pieces in y = log w
  std::vector<double> ends(breaks.begin() + (breaks.empty() ? 0 : 1), breaks.end());
  ends.push_back(W);
  double left = w0;
  for (double right : ends) {
    if (!(right > left)) continue;
    auto fy = [&](double y) { return std::exp(log_integrand(y) + y); };
    piece = detail::integrate_gk15(fy, std::log(left), std::log(right), tq);
    total += piece.value;
    err_total += piece.error;
    left = right;
  }
  if (!std::isfinite(total) || err_total > std::max(tol, 1e-13) * std::abs(total) + 1e-300)
    throw NumericalError("conjugate quadrature did not converge (estimate " +
                         fmt(err_total) + " for value " + fmt(total) + ")");
  return {total, err_total};
}

double Conjugate::inverse(std::size_t i, double s, double tol) const {
  if (!(s >= 0) || !std::isfinite(s)) throw DomainError("conjugate_inverse needs finite s >= 0");
  if (s == 0) return 0.0;
  const double W = phi_inverse(H_, i, s, 0.1 * tol);
  return integral(i, W, tol).value;
}

double Conjugate::solve_upper_limit(std::size_t i, double t, double tol) const {
  const double N = field_->N;
  const double p = field_->p_at(i);
  const double lt = std::log(t);
  // pure t^p closed form as the starting point: J(W) = p* W^{(N-p)/N}
  const double ps = sobolev_exponent(field_->N, p);
  const double y0 = (lt - std::log(ps)) * N / (N - p);
  auto g = [&](double y) {
    const double W = std::exp(y);
    const double J = integral(i, W, tol).value;
    return std::pair{std::log(J) - lt, W * j(i, W) / J};
  };
  auto r = detail::solve_increasing(g, y0, [&](double) { return 0.1 * tol; }, 1e-16, 300,
                                    "conjugate");
  return r.x;
}

double Conjugate::log_value(std::size_t i, double t, double tol) const {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("conjugate log_value needs finite t > 0");
  return H_.log_value(i, std::exp(solve_upper_limit(i, t, tol)));
}

double Conjugate::value(std::size_t i, double t, double tol) const {
  if (!(t >= 0) || !std::isfinite(t)) throw DomainError("conjugate needs finite t >= 0");
  if (t == 0) return 0.0;
  return std::exp(log_value(i, t, tol));
}

double conjugate_inverse(const ExponentField& field, std::size_t node, double s, double tol,
                         ConjugateBase base) {
  return Conjugate(std::make_shared<ExponentField>(field), base).inverse(node, s, tol);
}

double conjugate(const ExponentField& field, std::size_t node, double t, double tol,
                 ConjugateBase base) {
  return Conjugate(std::make_shared<ExponentField>(field), base).value(node, t, tol);
}

ConjugateTable conjugate_table(const Conjugate& c, std::size_t node, std::vector<double> s,
                               double tol) {
  ConjugateTable tab{node, std::move(s), {}, {}};
  for (double v : tab.s) {
    if (v == 0) {
      tab.inverse.push_back(0.0);
      tab.accuracy.push_back(0.0);
      continue;
    }
    auto I = c.integral(node, phi_inverse(c.phi(), node, v, 0.1 * tol), tol);
    tab.inverse.push_back(I.value);
    tab.accuracy.push_back(I.error);
  }
  return tab;
}

double relative_slack(double la, double lb) {
  if (la == -INFINITY && lb == -INFINITY) return 0.0;
  if (lb >= la) return -std::expm1(la - lb);
  return std::expm1(lb - la);
}

BoundReport verify_conjugate_bounds(const Conjugate& c, const std::vector<BoundSample>& samples,
                                    double tol) {
  BoundReport rep;
  rep.names = {"H*-p", "H*-q", "G*<=2cH*"};
  const ExponentField& f = c.field();
  PhiSpec G = PhiSpec::GStar(c.phi().field_ptr());
  const double lc = std::log(2.0) + c.log_qstar_power_sup();
  for (const auto& smp : samples) {
    BoundRow row{smp.node, smp.t, 0.0, {0.0, 0.0, 0.0}};
    if (smp.t > 0) {
      const auto ce = critical_exponents(f, smp.node);
      const double lt = std::log(smp.t);
      const double lH = c.log_value(smp.node, smp.t);
      row.conjugate = std::exp(lH);
      const double mu = f.mu_at(smp.node), q = f.q_at(smp.node);
      row.slack[0] = relative_slack(-ce.p_star * std::log(ce.p_star) + ce.p_star * lt, lH);
      const double lq = mu > 0 ? -ce.q_star * std::log(ce.q_star) + ce.q_star / q * std::log(mu) +
                                     ce.q_star * lt
                               : -INFINITY;
      row.slack[1] = relative_slack(lq, lH);
      row.slack[2] = relative_slack(G.log_value(smp.node, smp.t), lc + lH);
    }
    for (double s : row.slack) {
      rep.min_slack = std::min(rep.min_slack, s);
      if (s < -tol) rep.pass = false;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

BoundReport verify_trace_bound(const Conjugate& c, const std::vector<BoundSample>& samples,
                               double tol) {
  BoundReport rep;
  rep.names = {"T*<=2c^{(N-1)/N}H*^{(N-1)/N}"};
  const ExponentField& f = c.field();
  PhiSpec T = PhiSpec::TStar(c.phi().field_ptr());
  const double e = (f.N - 1.0) / f.N;
  for (const auto& smp : samples) {
    BoundRow row{smp.node, smp.t, 0.0, {0.0}};
    if (smp.t > 0) {
      const double lH = c.log_value(smp.node, smp.t);
      row.conjugate = std::exp(lH);
      row.slack[0] = relative_slack(T.log_value(smp.node, smp.t),
                                    std::log(2.0) + e * (c.log_qstar_power_sup() + lH));
    }
    rep.min_slack = std::min(rep.min_slack, row.slack[0]);
    if (row.slack[0] < -tol) rep.pass = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace musielak

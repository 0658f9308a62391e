#include "musielak/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "musielak/embedding.hpp"
#include "musielak/errors.hpp"
#include "musielak/parallel.hpp"

namespace musielak {

namespace {

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

bool leq_log(double la, double lb, double rel = 1e-12) {
  if (la == -INFINITY) return true;
  return la <= lb + rel * (1 + std::abs(lb));
}

}  // namespace

void RecursionParams::validate() const {
  if (!(K > 0) || !std::isfinite(K)) throw DomainError("recursion: K must be > 0");
  if (!(b > 1) || !std::isfinite(b)) throw DomainError("recursion: b must be > 1");
  if (!(mu1 > 0) || !(mu2 >= mu1) || !std::isfinite(mu2))
    throw DomainError("recursion: need 0 < mu1 <= mu2");
}

Thresholds recursion_thresholds(const RecursionParams& p) {
  p.validate();
  const double l2K = std::log(2 * p.K), lb = std::log(p.b);
  const double m1 = p.mu1, m2 = p.mu2;
  const double a = -l2K / m1 - lb / (m1 * m1);
  const double c = -l2K / m2 - lb * (1 / (m1 * m2) + (m2 - m1) / (m2 * m2));
  Thresholds t;
  t.log_T1 = std::min(0.0, a);
  t.log_T2 = std::min(a, c);
  t.T1 = std::exp(t.log_T1);
  t.T2 = std::exp(t.log_T2);
  return t;
}

double log_decay_envelope(const RecursionParams& p, std::size_t n) {
  const double l2K = std::log(2 * p.K), lb = std::log(p.b);
  return std::min(0.0, -l2K / p.mu1 - lb / (p.mu1 * p.mu1) - double(n) * lb / p.mu1);
}

RecursionTrace iterate_recursion(double Z0, const RecursionParams& p, std::size_t n_max) {
  if (n_max < 1) throw DomainError("iterate_recursion: n_max must be >= 1");
  if (!(Z0 >= 0) || !std::isfinite(Z0)) throw DomainError("iterate_recursion: Z0 must be finite >= 0");
  RecursionTrace tr;
  tr.thresholds = recursion_thresholds(p);
  const double lK = std::log(p.K), lb = std::log(p.b), lcap = std::log(kSentinel);
  double L = Z0 == 0 ? -INFINITY : std::log(Z0);
  double Z = Z0;  // exact value while it stays in the normal range
  bool linear = true;
  tr.admissible = leq_log(L, tr.thresholds.log_best(), 0.0);
  for (std::size_t n = 0;; ++n) {
    if (L > lcap) {
      tr.divergent = true;
      tr.log_Z.push_back(lcap);
      tr.Z.push_back(kSentinel);
      break;
    }
    tr.log_Z.push_back(L);
    tr.Z.push_back(linear ? Z : std::exp(L));
    if (!tr.n0 && L <= 0) tr.n0 = n;
    if (n == n_max) break;
    if (L == -INFINITY) continue;
    // plain arithmetic keeps seeds on the critical trajectory exact (powers
    // of two); logs take over once anything leaves the normal range
    if (linear) {
      const double a = std::pow(Z, 1 + p.mu1), b = std::pow(Z, 1 + p.mu2), c = p.K * std::pow(p.b, double(n));
      const double next = c * (a + b);
      linear = std::isnormal(a) && std::isnormal(b) && std::isnormal(c) && std::isnormal(next) && next <= kSentinel;
      if (linear) {
        Z = next;
        L = std::log(next);
        continue;
      }
    }
    L = lK + double(n) * lb + log_add((1 + p.mu1) * L, (1 + p.mu2) * L);
  }
  tr.envelope_ok = tr.n0.has_value() && !tr.divergent;
  if (tr.n0)
    for (std::size_t n = *tr.n0; n < tr.log_Z.size(); ++n)
      if (!leq_log(tr.log_Z[n], log_decay_envelope(p, n))) tr.envelope_ok = false;
  return tr;
}

RecursionParams fit_recursion(const std::vector<double>& Z, double mu1, double mu2) {
  std::vector<double> x, y;
  for (std::size_t n = 0; n + 1 < Z.size(); ++n) {
    if (!(Z[n] > 0 && Z[n + 1] > 0)) continue;
    const double L = std::log(Z[n]);
    x.push_back(double(n));
    y.push_back(std::log(Z[n + 1]) - log_add((1 + mu1) * L, (1 + mu2) * L));
  }
  if (x.size() < 2) throw NumericalError("fit_recursion needs two positive consecutive pairs");
  const auto f = fit_line(x, y);
  RecursionParams p{std::exp(f.intercept), std::exp(f.slope), mu1, mu2};
  return p;
}

LevelSet level_set(const GridFunction& u, double kappa) {
  const GridDomain& d = u.domain();
  LevelSet ls;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > kappa)) continue;
    ls.nodes.push_back(i);
    ls.measure += d.volume_weight(i);
    if (d.is_boundary(i)) {
      ls.boundary_nodes.push_back(i);
      ls.boundary_measure += d.facet_weight(i);
    }
  }
  return ls;
}

double kappa_sequence(double kappa_star, std::size_t n) {
  if (!(kappa_star > 0)) throw DomainError("kappa_star must be > 0");
  return kappa_star * (2 - std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n, 2000))));
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::SubcriticalD: return "subcritical-D";
    case Regime::SubcriticalN: return "subcritical-N";
    case Regime::CriticalD: return "critical-D";
    case Regime::CriticalN: return "critical-N";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::SubcriticalD, Regime::SubcriticalN, Regime::CriticalD, Regime::CriticalN})
    if (s == to_string(r)) return r;
  throw DomainError("unknown regime '" + s + "'");
}

TruncationSpec TruncationSpec::midpoint(FieldPtr f) {
  TruncationSpec t;
  const std::size_t n = f->size();
  t.r.resize(n), t.s.resize(n), t.l.resize(n), t.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = critical_exponents(*f, i);
    const double p = f->p_at(i), q = f->q_at(i);
    t.r[i] = 0.5 * (p + c.p_star);
    t.s[i] = 0.5 * (q + c.q_star);
    t.l[i] = 0.5 * (p + c.p_lower);
    t.h[i] = 0.5 * (q + c.q_lower);
  }
  t.field = std::move(f);
  return t;
}

namespace {

// Phi-functions and gradient shared by all steps of one run
struct Context {
  const GridFunction& u;
  Regime regime;
  std::optional<PhiSpec> inner, outer, H;
  std::vector<double> grad;
  double e_lo = 0, e_hi = 0;  // exponent range behind the interior measure bound
  double b_lo = 0, b_hi = 0;  // same for the boundary

  Context(const GridFunction& v, const TruncationSpec& spec, Regime r) : u(v), regime(r) {
    if (!spec.field) throw HypothesisError("truncation: no exponent field");
    spec.field->require_nodes(u.size());
    auto range = [&](const PhiSpec& s, bool first) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < std::max<std::size_t>(1, s.size()); ++i) {
        const double e = first ? s.terms(i).a : s.terms(i).b;
        lo = std::min(lo, e), hi = std::max(hi, e);
      }
      return std::pair{lo, hi};
    };
    if (is_critical(r)) {
      H = PhiSpec::H(spec.field);
      inner = PhiSpec::GStar(spec.field);
      if (is_neumann(r)) outer = PhiSpec::TStar(spec.field);
      grad = u.gradient_magnitude();
    } else {
      if (spec.r.empty() || spec.s.empty()) throw HypothesisError("truncation: missing r, s exponents");
      inner = PhiSpec::Psi(spec.field, spec.r, spec.s);
      if (is_neumann(r)) {
        if (spec.l.empty() || spec.h.empty())
          throw HypothesisError("truncation: Neumann regime needs boundary exponents l, h");
        outer = PhiSpec::Upsilon(spec.field, spec.l, spec.h);
      }
    }
    std::tie(e_lo, e_hi) = range(*inner, true);
    if (outer) std::tie(b_lo, b_hi) = range(*outer, true);
  }

  IterationEnergy energy(double kappa_star, std::size_t n) const {
    IterationEnergy e{regime, n, kappa_sequence(kappa_star, n), 0, 0, 0, level_set(u, kappa_sequence(kappa_star, n))};
    const GridDomain& d = u.domain();
    const double k = e.kappa_n;
    double Z = 0;
    for (std::size_t i : e.level.nodes) {
      double term = (*inner)(i, u[i] - k);
      if (H && grad[i] > 0) term += (*H)(i, grad[i]);
      Z += d.volume_weight(i) * term;
    }
    double Y = 0;
    if (outer)
      for (std::size_t i : e.level.boundary_nodes) Y += d.facet_weight(i) * (*outer)(i, u[i] - k);
    e.Z = Z, e.Y = Y, e.X = Z + Y;
    return e;
  }
};

double rel_slack(double bound, double value) {
  if (bound == value) return 0.0;
  return (bound - value) / std::max(std::abs(bound), std::abs(value));
}

}  // namespace

IterationEnergy truncation_energy(const GridFunction& u, const TruncationSpec& spec, Regime regime,
                                  double kappa_star, std::size_t n) {
  return Context(u, spec, regime).energy(kappa_star, n);
}

void BoundConstants::validate() const {
  for (double v : {C, tau1, tau2, alpha2, alpha3, beta, gamma, C13, delta1, delta2, mu1, mu2})
    if (!(v > 0) || !std::isfinite(v)) throw DomainError("bound constants must be positive and finite");
  if (!(delta1 <= delta2)) throw DomainError("bound constants: need delta1 <= delta2");
  if (!(mu1 <= mu2)) throw DomainError("bound constants: need mu1 <= mu2");
  if (!(b > 1) || !std::isfinite(b)) throw DomainError("bound constants: need b > 1");
}

BoundConstants derive_recursion_constants(const ExponentField& f, double r_min, double r_max,
                                          double s_min, double s_max, BoundConstants base) {
  const double pp = f.p_max(), pm = f.p_min(), qp = f.q_max();
  const double ps_min = sobolev_exponent(f.N, pm), qs_min = sobolev_exponent(f.N, f.q_min());
  if (!(pp < r_min && r_min <= r_max && r_max < ps_min))
    throw HypothesisError("recursion constants need p+ < r- <= r+ < (p*)-");
  if (!(qp < s_min && s_min <= s_max && s_max < qs_min))
    throw HypothesisError("recursion constants need q+ < s- <= s+ < (q*)-");
  const double g1 = std::min(r_min / pp, s_min / qp) - 1;
  const double g2 = std::max(r_max / pm, s_max / pm) - 1;
  const double eps = 0.5 * std::min(ps_min - r_max, qs_min - s_max);
  const double D = r_max + s_max + eps;
  BoundConstants c = base;
  c.mu1 = eps * r_min / D;
  c.mu2 = r_max * (1 + g2) + eps * r_max / D;
  c.b = std::exp2((r_max + s_max) * (1 + g2) + eps * r_max / D);
  c.delta1 = g1 + eps / D;
  c.delta2 = g2 + eps / D;
  c.tau1 = c.delta1 / c.mu2;
  c.tau2 = c.delta2 / c.mu1;
  return c;
}

namespace {

// log of the b-power shared by the kappa_* formula and its conditions
double log_b_part(const BoundConstants& c) {
  return std::log(c.b) * (1 / c.delta1 + (c.delta2 - c.delta1) / c.delta2);
}

}  // namespace

KappaStar kappa_star_dirichlet(double psi_modular, const BoundConstants& c) {
  c.validate();
  if (!(psi_modular >= 0) || !std::isfinite(psi_modular))
    throw DomainError("kappa_star: modular must be finite >= 0");
  if (psi_modular == 0) return {0.0, true};
  const double l4 = std::log(4 * c.C13), lI = std::log(psi_modular);
  const double lk = std::max(l4 / c.mu1, l4 / c.mu2) + log_b_part(c) / c.mu1 +
                    std::max(lI * c.delta1 / c.mu2, lI * c.delta2 / c.mu1);
  return {std::exp(lk), false};
}

KappaConditions kappa_conditions(double kappa, double psi_modular, const BoundConstants& c) {
  if (psi_modular == 0) return {INFINITY, INFINITY};
  const double lk = std::log(kappa), l4 = std::log(4 * c.C13), lI = std::log(psi_modular);
  const double lbp = log_b_part(c);
  const double r1 = l4 / c.mu1 + lbp / c.mu1 + std::max(lI * c.delta1 / c.mu1, lI * c.delta2 / c.mu1);
  const double r2 = l4 / c.mu2 + lbp / c.mu2 + std::max(lI * c.delta1 / c.mu2, lI * c.delta2 / c.mu2);
  auto slack = [&](double rhs) { return (lk - rhs) / (1 + std::abs(rhs)); };
  return {slack(r1), slack(r2)};
}

double bound_estimate(double norm_psi, std::optional<double> norm_upsilon, const BoundConstants& c,
                      Regime regime) {
  if (!(norm_psi >= 0)) throw DomainError("bound_estimate: norm must be >= 0");
  double n = norm_psi;
  if (is_neumann(regime)) {
    if (!norm_upsilon) throw HypothesisError("bound_estimate: Neumann regime needs the boundary norm");
    n += *norm_upsilon;
  }
  if (n == 0) return 0.0;
  return c.C * std::max(std::pow(n, c.tau1), std::pow(n, c.tau2));
}

BoundConstants dirichlet_bound_constants(BoundConstants c, double lo, double hi) {
  c.validate();
  const double l4 = std::log(4 * c.C13);
  c.C = 2 * std::exp(std::max(l4 / c.mu1, l4 / c.mu2) + log_b_part(c) / c.mu1);
  c.tau1 = lo * c.delta1 / c.mu2;
  c.tau2 = hi * c.delta2 / c.mu1;
  return c;
}

namespace {

KappaRun run_in_context(const Context& ctx, const TruncationSpec& spec, double kappa_star,
                        std::size_t n_max) {
  const GridFunction& u = ctx.u;
  KappaRun run;
  run.kappa_star = kappa_star;
  for (std::size_t n = 0; n <= n_max; ++n) {
    run.steps.push_back(ctx.energy(kappa_star, n));
    if (run.steps.back().X == 0 && run.steps.back().level.nodes.empty()) {
      // empty level set: all later steps are empty too; record one more for the checks
      if (n < n_max) run.steps.push_back(ctx.energy(kappa_star, n + 1));
      break;
    }
  }
  auto& inv = run.invariants;
  inv.min_est_u_slack = inv.min_measure_slack = inv.min_boundary_measure_slack = INFINITY;
  for (std::size_t k = 0; k + 1 < run.steps.size(); ++k) {
    const auto& a = run.steps[k];
    const auto& nx = run.steps[k + 1];
    const std::size_t n = a.n;
    const double factor = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n + 2, 1000))) - 1;
    for (std::size_t i : nx.level.nodes)
      inv.min_est_u_slack = std::min(inv.min_est_u_slack, (factor * (u[i] - a.kappa_n) - u[i]) / std::abs(u[i]));
    auto bound = [&](double lo, double hi, double energy) {
      return (std::pow(kappa_star, -lo) + std::pow(kappa_star, -hi)) *
             std::exp2(double(n + 1) * hi) * energy;
    };
    inv.min_measure_slack = std::min(inv.min_measure_slack,
                                     rel_slack(bound(ctx.e_lo, ctx.e_hi, a.Z), nx.level.measure));
    if (ctx.outer)
      inv.min_boundary_measure_slack =
          std::min(inv.min_boundary_measure_slack,
                   rel_slack(bound(ctx.b_lo, ctx.b_hi, a.Y), nx.level.boundary_measure));
    if (nx.Z > a.Z * (1 + 1e-12) || nx.Y > a.Y * (1 + 1e-12)) inv.monotone = false;
    if (a.Z == 0 && nx.level.measure > 0) inv.chebyshev = false;
  }
  for (double* v : {&inv.min_est_u_slack, &inv.min_measure_slack, &inv.min_boundary_measure_slack})
    if (*v == INFINITY) *v = 0;

  // entry condition at kappa_*
  try {
    const auto H = PhiSpec::H(spec.field);
    const auto G = PhiSpec::GStar(spec.field);
    const auto grad = ctx.grad.empty() ? u.gradient_magnitude() : ctx.grad;
    const auto ls = level_set(u, kappa_star);
    double e = 0;
    for (std::size_t i : ls.nodes)
      e += u.domain().volume_weight(i) *
           ((grad[i] > 0 ? H(i, grad[i]) : 0.0) + H(i, std::abs(u[i])) + G(i, std::abs(u[i])));
    run.entry = e;
    run.entry_below_one = e < 1;
  } catch (const Error&) {
    run.entry = std::nan("");
    run.entry_below_one = false;
  }
  run.decays = run.steps.back().X < kDecayTol;
  return run;
}

}  // namespace

KappaRun run_kappa(const GridFunction& u, const TruncationSpec& spec, Regime regime, double kappa_star,
                   std::size_t n_max) {
  if (!(kappa_star > 0)) throw DomainError("kappa_star must be > 0");
  return run_in_context(Context(u, spec, regime), spec, kappa_star, n_max);
}

std::vector<double> default_kappa_grid() {
  std::vector<double> g;
  for (int k = -160; k <= 160; ++k) g.push_back(std::pow(10.0, k / 20.0));
  return g;
}

EmpiricalReport empirical_iteration(const GridFunction& u, const TruncationSpec& spec, Regime regime,
                                    std::vector<double> grid, std::size_t n_max) {
  if (grid.empty()) grid = default_kappa_grid();
  std::sort(grid.begin(), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(), [](double k) { return !(k > 0); }), grid.end());
  if (grid.empty()) throw DomainError("empirical_iteration: no positive candidates");
  const Context ctx(u, spec, regime);
  EmpiricalReport rep;
  rep.esssup = u.max();

  std::vector<std::optional<KappaRun>> runs(grid.size());
  auto eval = [&](std::size_t k) -> const KappaRun& {
    if (!runs[k]) {
      runs[k] = run_in_context(ctx, spec, grid[k], n_max);
      ++rep.candidates_tried;
    }
    return *runs[k];
  };
  if (!eval(grid.size() - 1).decays) {
    rep.diagnostics = "no candidate decays; largest kappa_* gives X_n = " +
                      std::to_string(runs.back()->steps.back().X);
    return rep;
  }
  std::size_t lo = 0, hi = grid.size() - 1;  // hi passes
  if (eval(0).decays) hi = 0;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (eval(mid).decays ? hi : lo) = mid;
  }
  rep.chosen = eval(hi);
  // one cell of variation as the grid tolerance
  const auto g = u.gradient_magnitude();
  const double cell = (g.empty() ? 0.0 : *std::max_element(g.begin(), g.end())) * u.domain().max_spacing();
  rep.bound_ok = rep.esssup <= 2 * rep.chosen->kappa_star + cell;
  if (!rep.chosen->invariants.ok()) rep.diagnostics = "truncation invariants violated";
  return rep;
}

TwoSidedReport empirical_iteration_two_sided(const GridFunction& u, const TruncationSpec& spec,
                                             Regime regime, std::vector<double> grid, std::size_t n_max) {
  TwoSidedReport r;
  r.upper = empirical_iteration(u, spec, regime, grid, n_max);
  r.lower = empirical_iteration(u.negated(), spec, regime, grid, n_max);
  return r;
}

}  // namespace musielak

#include "musielak/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

#include "musielak/errors.hpp"
#include "musielak/parallel.hpp"

namespace musielak {

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::DirichletZero ? "dirichlet-zero" : "neumann";
}

BoundaryCondition boundary_condition_from_string(const std::string& s) {
  if (s == "dirichlet-zero" || s == "dirichlet") return BoundaryCondition::DirichletZero;
  if (s == "neumann") return BoundaryCondition::Neumann;
  throw DomainError("unknown boundary condition '" + s + "'");
}

void ProblemSpec::validate() const {
  if (!field) throw DomainError("problem has no exponent field");
  const GridDomain& d = f.domain();
  field->require_nodes(d.size());
  for (std::size_t i = 0; i < field->size(); ++i) {
    const double p = field->p_at(i), q = field->q_at(i), m = field->mu_at(i);
    if (!(p > 1 && q >= p && m >= 0) || !std::isfinite(q) || !std::isfinite(m))
      throw HypothesisError("solver needs 1 < p <= q and mu >= 0 at every node");
  }
  for (double v : f.values())
    if (!std::isfinite(v)) throw DomainError("source f is not finite");
  if (!(options.grad_tol > 0) || !(options.eps_reg >= 0) || options.memory == 0)
    throw DomainError("bad solver options");
  if (bc == BoundaryCondition::Neumann) {
    if (g) {
      require_same_domain(d, g->domain());
      for (double v : g->values())
        if (!std::isfinite(v)) throw DomainError("boundary flux g is not finite");
    }
    // constants are in the kernel of the gradient part
    double tot = 0, scale = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double a = d.volume_weight(i) * f[i] + (g ? d.facet_weight(i) * (*g)[i] : 0.0);
      tot += a;
      scale += std::abs(a);
    }
    if (std::abs(tot) > 1e-10 * scale + 1e-300)
      throw ContractError("Neumann data incompatible: int f + int_G g != 0");
  } else if (g && !g->is_zero()) {
    throw ContractError("boundary flux given for a Dirichlet problem");
  }
}

namespace {

// Kuhn triangulation: cell corner c and permutation pi give the simplex
// c, c+e_pi0, c+e_pi0+e_pi1, ...; the gradient component along pi_k is the
// difference across its k-th edge.
struct Mesh {
  std::size_t dim = 0;
  std::size_t nv = 0;  // dim + 1
  std::vector<std::size_t> verts;  // nv per element
  std::vector<std::uint8_t> axis;  // dim per element
  std::vector<double> p, q, mu;    // per element
  std::vector<double> inv_h;       // per axis
  double vol = 0;
  std::vector<double> load;  // per node
  std::vector<char> fixed;   // Dirichlet boundary
  std::vector<double> w;     // stop-test scaling per node
  double eps = 0;
  std::size_t size() const { return p.size(); }
};

Mesh build_mesh(const ProblemSpec& spec) {
  spec.validate();
  const GridDomain& d = spec.f.domain();
  const ExponentField& fld = *spec.field;
  Mesh m;
  m.dim = d.dim();
  m.nv = m.dim + 1;
  m.eps = spec.options.eps_reg;
  for (std::size_t a = 0; a < m.dim; ++a) m.inv_h.push_back(1 / d.spacing()[a]);
  std::vector<std::size_t> perm(m.dim);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  m.vol = d.cell_measure() / static_cast<double>(perms.size());

  for (std::size_t node = 0; node < d.size(); ++node) {
    const auto idx = d.multi_index(node);
    bool corner = true;
    for (std::size_t a = 0; a < m.dim; ++a) corner = corner && idx[a] + 1 < d.shape()[a];
    if (!corner) continue;
    for (const auto& pi : perms) {
      std::size_t v = node;
      double ps = fld.p_at(v), qs = fld.q_at(v), ms = fld.mu_at(v);
      m.verts.push_back(v);
      for (std::size_t k = 0; k < m.dim; ++k) {
        v += d.stride(pi[k]);
        m.verts.push_back(v);
        m.axis.push_back(static_cast<std::uint8_t>(pi[k]));
        ps += fld.p_at(v), qs += fld.q_at(v), ms += fld.mu_at(v);
      }
      m.p.push_back(ps / m.nv);
      m.q.push_back(qs / m.nv);
      m.mu.push_back(ms / m.nv);
    }
  }
  m.load.assign(d.size(), 0.0);
  m.fixed.assign(d.size(), 0);
  m.w.assign(d.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    m.load[i] = d.volume_weight(i) * spec.f[i];
    m.w[i] = d.volume_weight(i);
  }
  if (spec.bc == BoundaryCondition::Neumann) {
    if (spec.g)
      for (std::size_t i = 0; i < d.size(); ++i) m.load[i] += d.facet_weight(i) * (*spec.g)[i];
  } else {
    for (std::size_t b : d.boundary_nodes()) m.fixed[b] = 1, m.load[b] = 0;
  }
  return m;
}

void check_bc(const Mesh& m, const GridFunction& u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (m.fixed[i] && u[i] != 0) throw ContractError("u does not vanish on the Dirichlet boundary");
}

// element gradient
inline std::array<double, GridDomain::kMaxDim> grad_e(const Mesh& m, std::size_t e, const double* u) {
  std::array<double, GridDomain::kMaxDim> g{};
  const std::size_t* v = &m.verts[e * m.nv];
  for (std::size_t k = 0; k < m.dim; ++k) g[m.axis[e * m.dim + k]] = (u[v[k + 1]] - u[v[k]]) * m.inv_h[m.axis[e * m.dim + k]];
  return g;
}

inline double sq(const std::array<double, GridDomain::kMaxDim>& g, std::size_t dim) {
  double s = 0;
  for (std::size_t a = 0; a < dim; ++a) s += g[a] * g[a];
  return s;
}

inline double density(const Mesh& m, std::size_t e, double g2) {
  const double a = g2 + m.eps;
  const double p = m.p[e], q = m.q[e];
  double v = (std::pow(a, p / 2) - std::pow(m.eps, p / 2)) / p;
  if (m.mu[e] != 0) v += m.mu[e] * (std::pow(a, q / 2) - std::pow(m.eps, q / 2)) / q;
  return v;
}

// a'^k - a^k with a' = a + da, no cancellation
inline double pow_diff(double a, double da, double k) {
  if (a == 0) return std::pow(da, k);
  return std::pow(a, k) * std::expm1(k * std::log1p(da / a));
}

double energy_impl(const Mesh& m, const double* u, std::size_t n) {
  const double grad_part = parallel_sum(m.size(), [&](std::size_t e) {
    return m.vol * density(m, e, sq(grad_e(m, e, u), m.dim));
  });
  double load = 0;
  for (std::size_t i = 0; i < n; ++i) load += m.load[i] * u[i];
  return grad_part - load;
}

// E(u + t d) - E(u)
double energy_change(const Mesh& m, const double* u, const double* dir, double t, std::size_t n) {
  const double grad_part = parallel_sum(m.size(), [&](std::size_t e) {
    const auto g = grad_e(m, e, u);
    auto dg = grad_e(m, e, dir);
    double da = 0;
    for (std::size_t a = 0; a < m.dim; ++a) da += t * dg[a] * (2 * g[a] + t * dg[a]);
    const double a0 = sq(g, m.dim) + m.eps;
    double v = pow_diff(a0, da, m.p[e] / 2) / m.p[e];
    if (m.mu[e] != 0) v += m.mu[e] * pow_diff(a0, da, m.q[e] / 2) / m.q[e];
    return m.vol * v;
  });
  double load = 0;
  for (std::size_t i = 0; i < n; ++i) load += m.load[i] * dir[i];
  return grad_part - t * load;
}

void gradient_impl(const Mesh& m, const double* u, std::vector<double>& out) {
  const std::size_t ne = m.size();
  // fluxes in parallel, scatter sequentially
  std::vector<double> flux(ne * m.dim);
  parallel_blocks(ne, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t e = lo; e < hi; ++e) {
      const auto g = grad_e(m, e, u);
      const double a = sq(g, m.dim) + m.eps;
      double c = std::pow(a, m.p[e] / 2 - 1);
      if (m.mu[e] != 0) c += m.mu[e] * std::pow(a, m.q[e] / 2 - 1);
      for (std::size_t k = 0; k < m.dim; ++k) {
        const std::size_t ax = m.axis[e * m.dim + k];
        flux[e * m.dim + k] = m.vol * c * g[ax] * m.inv_h[ax];
      }
    }
  });
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t* v = &m.verts[e * m.nv];
    for (std::size_t k = 0; k < m.dim; ++k) {
      const double fl = flux[e * m.dim + k];
      out[v[k + 1]] += fl;
      out[v[k]] -= fl;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.fixed[i] ? 0.0 : out[i] - m.load[i];
}

double scaled_norm(const Mesh& m, const std::vector<double>& g) {
  double r = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!m.fixed[i]) r = std::max(r, std::abs(g[i]) / m.w[i]);
  return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void remove_mean(const GridDomain& d, std::vector<double>& u) {
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += d.volume_weight(i) * u[i];
  s /= d.measure();
  for (double& v : u) v -= s;
}

}  // namespace

double energy(const ProblemSpec& spec, const GridFunction& u) {
  require_same_domain(spec.f.domain(), u.domain());
  const Mesh m = build_mesh(spec);
  check_bc(m, u);
  return energy_impl(m, u.values().data(), u.size());
}

GridFunction energy_gradient(const ProblemSpec& spec, const GridFunction& u) {
  require_same_domain(spec.f.domain(), u.domain());
  const Mesh m = build_mesh(spec);
  check_bc(m, u);
  std::vector<double> g(u.size());
  gradient_impl(m, u.values().data(), g);
  return GridFunction(u.domain_ptr(), std::move(g));
}

Solution solve(const ProblemSpec& spec, std::optional<GridFunction> initial) {
  const Mesh m = build_mesh(spec);
  const GridDomain& d = spec.f.domain();
  const std::size_t n = d.size();
  std::vector<double> u(n, 0.0);
  if (initial) {
    require_same_domain(d, initial->domain());
    check_bc(m, *initial);
    u.assign(initial->values().begin(), initial->values().end());
  }
  const bool neumann = spec.bc == BoundaryCondition::Neumann;
  if (neumann) remove_mean(d, u);

  SolveReport rep;
  std::vector<double> g(n), g_new(n), dir(n), trial(n);
  gradient_impl(m, u.data(), g);
  double E = energy_impl(m, u.data(), n);
  rep.grad_norm = scaled_norm(m, g);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> mem;
  std::vector<double> alpha(spec.options.memory);
  const double c1 = 1e-4;

  while (rep.grad_norm > spec.options.grad_tol) {
    if (rep.iterations >= spec.options.max_iter) {
      rep.message = "iteration cap reached";
      break;
    }
    // two-loop recursion
    for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * dot(mem[k].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * mem[k].y[i];
    }
    double gamma = 1;
    if (!mem.empty()) gamma = dot(mem.back().s, mem.back().y) / dot(mem.back().y, mem.back().y);
    else {
      // first step: scale by the inverse of the scaled gradient size
      double gn = 0;
      for (double v : g) gn = std::max(gn, std::abs(v));
      gamma = gn > 0 ? std::min(1.0, 1.0 / gn) * d.max_spacing() : 1;
    }
    for (double& v : dir) v *= gamma;
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * dot(mem[k].y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[k] - beta) * mem[k].s[i];
    }
    double slope = dot(g, dir);
    if (!(slope < 0)) {
      mem.clear();
      ++rep.restarts;
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i] * d.max_spacing();
      slope = dot(g, dir);
    }

    double t = 1, dE = 0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      dE = energy_change(m, u.data(), dir.data(), t, n);
      if (std::isfinite(dE) && dE <= c1 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!mem.empty()) {
        // stale curvature; retry along the gradient
        mem.clear();
        ++rep.restarts;
        continue;
      }
      rep.message = "line search failed";
      break;
    }
    for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * dir[i];
    gradient_impl(m, trial.data(), g_new);
    if (dE > 0) rep.energy_monotone = false;
    E += dE;

    Pair pr{std::vector<double>(n), std::vector<double>(n), 0};
    for (std::size_t i = 0; i < n; ++i) pr.s[i] = t * dir[i], pr.y[i] = g_new[i] - g[i];
    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-300) {
      pr.rho = 1 / sy;
      mem.push_back(std::move(pr));
      if (mem.size() > spec.options.memory) mem.pop_front();
    }
    u.swap(trial);
    g.swap(g_new);
    rep.grad_norm = scaled_norm(m, g);
    ++rep.iterations;
  }
  rep.converged = rep.grad_norm <= spec.options.grad_tol;
  if (rep.converged) rep.message = "converged";
  if (neumann) remove_mean(d, u);
  rep.energy = energy_impl(m, u.data(), n);
  return {GridFunction(spec.f.domain_ptr(), std::move(u)), rep};
}

double weak_residual(const ProblemSpec& spec, const GridFunction& u) {
  const Mesh m = build_mesh(spec);
  require_same_domain(spec.f.domain(), u.domain());
  check_bc(m, u);
  std::vector<double> g(u.size());
  gradient_impl(m, u.values().data(), g);
  return scaled_norm(m, g);
}

double weak_residual(const ProblemSpec& spec, const GridFunction& u, const std::vector<GridFunction>& basis) {
  const GridFunction g = energy_gradient(spec, u);
  const GridDomain& d = u.domain();
  const bool dir = spec.bc == BoundaryCondition::DirichletZero;
  double r = 0;
  for (const auto& phi : basis) {
    require_same_domain(d, phi.domain());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (dir && d.is_boundary(i) && phi[i] != 0)
        throw ContractError("test function does not vanish on the Dirichlet boundary");
      num += g[i] * phi[i];
      den += d.volume_weight(i) * std::abs(phi[i]);
    }
    if (den > 0) r = std::max(r, std::abs(num) / den);
  }
  return r;
}

}  // namespace musielak

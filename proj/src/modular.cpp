#include "musielak/modular.hpp"

#include <cmath>

#include "musielak/detail/roots.hpp"
#include "musielak/errors.hpp"
#include "musielak/parallel.hpp"

namespace musielak {

namespace {

void check(const ExponentField& f, const GridFunction& u) { f.require_nodes(u.size()); }

void check_spec(const PhiSpec& s, const GridFunction& u) {
  check(s.field(), u);
  const std::size_t n = s.size();
  if (n != 1 && n != u.size())
    throw DimensionError("Phi-function exponents do not match the grid");
}

// phi(i, t) and t * phi'(i, t), both 0 at t = 0
inline std::array<double, 2> phi_and_tdphi(const PhiSpec& s, std::size_t i, double t) {
  if (t == 0) return {0.0, 0.0};
  return {s(i, t), t * s.derivative(i, t)};
}

NormResult weighted_norm(const PhiSpec& spec, const GridFunction& u,
                         std::span<const double> weights, const std::vector<std::size_t>* nodes,
                         double tol) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  const std::size_t n = nodes ? nodes->size() : u.size();
  auto node = [&](std::size_t k) { return nodes ? (*nodes)[k] : k; };
  bool zero = true;
  for (std::size_t k = 0; k < n && zero; ++k) zero = u[node(k)] == 0.0 || weights[node(k)] == 0.0;
  if (zero) return {0.0, 0.0, 0};
  auto eval = [&](double lambda) {
    auto s = parallel_sum2(n, [&](std::size_t k) {
      const std::size_t i = node(k);
      auto v = phi_and_tdphi(spec, i, std::abs(u[i]) / lambda);
      return std::array<double, 2>{weights[i] * v[0], -weights[i] * v[1]};
    });
    return std::pair{s[0], s[1]};
  };
  const auto [lo, hi] = spec.exponent_range();
  return norm_from_modular(eval, eval(1.0).first, lo, hi, tol);
}

}  // namespace

NormResult norm_from_modular(const std::function<std::pair<double, double>(double)>& eval,
                             double rho1, double lo, double hi, double tol) {
  if (!(rho1 > 0)) return {0.0, 0.0, 0};
  // sandwich: rho <= 1 gives rho^{1/lo} <= norm <= rho^{1/hi}, reversed above 1
  const double lr = std::log(rho1);
  const double y0 = 0.5 * (lr / lo + lr / hi);
  // increasing in y = log lambda: g = -log rho(u / e^y)
  auto g = [&](double y) {
    auto [r, dr] = eval(std::exp(y));
    if (!(r > 0)) return std::pair<double, double>{INFINITY, 0.0};
    return std::pair{-std::log(r), -dr / r};
  };
  const double ftol = 0.5 * tol;
  auto res = detail::solve_increasing(g, y0, [&](double) { return ftol; }, 1e-16, 500,
                                      "luxemburg_norm");
  const double lam = std::exp(res.x);
  return {lam, eval(lam).first, res.iterations};
}

double modular_rho(const PhiSpec& spec, const GridFunction& u) {
  check_spec(spec, u);
  const auto w = u.domain().volume_weights();
  return parallel_sum(u.size(), [&](std::size_t i) {
    const double t = std::abs(u[i]);
    return t == 0 ? 0.0 : w[i] * spec(i, t);
  });
}

double modular_sobolev(const ExponentField& field, const GridFunction& u) {
  check(field, u);
  const auto w = u.domain().volume_weights();
  const auto g = u.gradient_magnitude();
  auto H = [&](std::size_t i, double t) {
    return t == 0 ? 0.0 : std::pow(t, field.p_at(i)) + field.mu_at(i) * std::pow(t, field.q_at(i));
  };
  return parallel_sum(u.size(), [&](std::size_t i) {
    return w[i] * (H(i, g[i]) + H(i, std::abs(u[i])));
  });
}

double boundary_modular(const PhiSpec& spec, const GridFunction& u) {
  check_spec(spec, u);
  const auto& nodes = u.domain().boundary_nodes();
  if (nodes.empty()) throw DomainError("domain has no boundary nodes");
  const auto w = u.domain().facet_weights();
  return parallel_sum(nodes.size(), [&](std::size_t k) {
    const std::size_t i = nodes[k];
    const double t = std::abs(u[i]);
    return t == 0 ? 0.0 : w[i] * spec(i, t);
  });
}

NormResult luxemburg_norm(const PhiSpec& spec, const GridFunction& u, double tol) {
  check_spec(spec, u);
  return weighted_norm(spec, u, u.domain().volume_weights(), nullptr, tol);
}

NormResult boundary_norm(const PhiSpec& spec, const GridFunction& u, double tol) {
  check_spec(spec, u);
  const auto& nodes = u.domain().boundary_nodes();
  if (nodes.empty()) throw DomainError("domain has no boundary nodes");
  return weighted_norm(spec, u, u.domain().facet_weights(), &nodes, tol);
}

NormResult sobolev_norm(const ExponentField& field, const GridFunction& u, double tol) {
  check(field, u);
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  if (u.is_zero()) return {0.0, 0.0, 0};
  const auto w = u.domain().volume_weights();
  const auto g = u.gradient_magnitude();
  auto H = [&](std::size_t i, double t) -> std::array<double, 2> {
    if (t == 0) return {0.0, 0.0};
    const double p = field.p_at(i), q = field.q_at(i), mu = field.mu_at(i);
    const double tp = std::pow(t, p), tq = mu == 0 ? 0.0 : mu * std::pow(t, q);
    return {tp + tq, p * tp + q * tq};
  };
  auto eval = [&](double lambda) {
    auto s = parallel_sum2(u.size(), [&](std::size_t i) {
      auto a = H(i, g[i] / lambda), b = H(i, std::abs(u[i]) / lambda);
      return std::array<double, 2>{w[i] * (a[0] + b[0]), -w[i] * (a[1] + b[1])};
    });
    return std::pair{s[0], s[1]};
  };
  return norm_from_modular(eval, eval(1.0).first, field.p_min(), field.q_max(), tol);
}

}  // namespace musielak

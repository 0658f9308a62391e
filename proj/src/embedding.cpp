#include "musielak/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "musielak/errors.hpp"
#include "musielak/modular.hpp"
#include "musielak/parallel.hpp"

namespace musielak {

std::string to_string(WeightMode m) { return m == WeightMode::One ? "one" : "radial"; }

WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "one" || s == "1" || s == "mu=1") return WeightMode::One;
  if (s == "radial" || s == "|x|" || s == "mu=|x|") return WeightMode::Radial;
  throw DomainError("unknown weight mode '" + s + "'");
}

GridFunction bump(std::shared_ptr<const GridDomain> d) {
  const std::size_t dim = d->dim();
  return GridFunction::from_function(std::move(d), [dim](const GridDomain::Point& x) {
    double r2 = 0;
    for (std::size_t a = 0; a < dim; ++a) r2 += x[a] * x[a];
    return r2 < 1 ? std::exp(-1 / (1 - r2)) : 0.0;
  });
}

GridFunction scale_function(const GridFunction& u, double lambda) {
  if (!(lambda >= 1) || !std::isfinite(lambda)) throw DomainError("scale_function needs lambda >= 1");
  const GridDomain& d = u.domain();
  for (std::size_t b : d.boundary_nodes())
    if (u[b] != 0) throw DomainError("scale_function: u must vanish on the boundary");
  if (lambda == 1) return u;
  const std::size_t dim = d.dim();
  std::vector<double> out(u.size(), 0.0);
  parallel_blocks(u.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto x = d.coordinates(i);
      std::array<std::size_t, GridDomain::kMaxDim> c0{};
      std::array<double, GridDomain::kMaxDim> fr{};
      bool inside = true;
      for (std::size_t a = 0; a < dim && inside; ++a) {
        const double y = lambda * x[a];
        if (y < d.lower()[a] || y > d.upper()[a]) {
          inside = false;
          break;
        }
        const double t = (y - d.lower()[a]) / d.spacing()[a];
        const std::size_t n = d.shape()[a];
        std::size_t k = static_cast<std::size_t>(std::floor(t));
        if (k + 1 >= n) k = n - 2;
        c0[a] = k;
        fr[a] = std::clamp(t - static_cast<double>(k), 0.0, 1.0);
      }
      if (!inside) continue;
      double acc = 0;
      for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
        GridDomain::Index idx{};
        double w = 1;
        for (std::size_t a = 0; a < dim; ++a) {
          const bool up = (corner >> a) & 1;
          idx[a] = c0[a] + up;
          w *= up ? fr[a] : 1 - fr[a];
        }
        if (w != 0) acc += w * u[d.linear_index(idx)];
      }
      out[i] = acc;
    }
  });
  return GridFunction(u.domain_ptr(), std::move(out));
}

std::vector<double> weight_values(const GridDomain& d, WeightMode m) {
  std::vector<double> mu(d.size(), 1.0);
  if (m == WeightMode::Radial)
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto x = d.coordinates(i);
      double r2 = 0;
      for (std::size_t a = 0; a < d.dim(); ++a) r2 += x[a] * x[a];
      mu[i] = std::sqrt(r2);
    }
  return mu;
}

EmbeddingSides embedding_sides(const GridFunction& u, const ExponentField& field, const BParams& b,
                               WeightMode wm) {
  field.require_nodes(u.size());
  if (!(b.r > 0 && b.s > 0 && b.alpha >= 0)) throw DomainError("B exponents must be positive");
  EmbeddingSides out;
  if (u.is_zero()) return out;
  const GridDomain& d = u.domain();
  const auto w = d.volume_weights();
  const auto mu = weight_values(d, wm);
  const auto g = u.gradient_magnitude();
  auto lhs = parallel_sum2(u.size(), [&](std::size_t i) {
    const double t = std::abs(u[i]);
    return std::array<double, 2>{w[i] * std::pow(t, b.r),
                                 w[i] * std::pow(mu[i], b.alpha) * std::pow(t, b.s)};
  });
  auto rhs = parallel_sum2(u.size(), [&](std::size_t i) {
    return std::array<double, 2>{w[i] * std::pow(g[i], field.p_at(i)),
                                 w[i] * mu[i] * std::pow(g[i], field.q_at(i))};
  });
  out.lhs_r = std::pow(lhs[0], 1 / b.r);
  out.lhs_s = std::pow(lhs[1], 1 / b.s);
  out.rhs_p = std::pow(rhs[0], 1 / field.p_min());
  out.rhs_q = std::pow(rhs[1], 1 / field.q_min());

  auto fw = std::make_shared<ExponentField>(field.N, field.p, field.q, mu);
  const auto spec = PhiSpec::B(fw, {b.r}, {b.s}, {b.alpha});
  out.norm = luxemburg_norm(spec, u).value;
  const double ab = out.lhs();
  const double slack = 1e-9;
  out.sandwich_ok = 0.5 * ab <= out.norm * (1 + slack) &&
                    out.norm <= std::pow(2.0, 1 / std::min(b.r, b.s)) * ab * (1 + slack);
  return out;
}

std::vector<double> default_lambdas(const GridDomain& d) {
  std::vector<double> out;
  for (double l = 1; l <= 16; l *= 2)
    if (1 / l >= 8 * d.max_spacing()) out.push_back(l);
  return out;
}

ScalingExperiment run_scaling(GridFunction base, std::shared_ptr<const ExponentField> field,
                              BParams b, WeightMode w, std::vector<double> lambdas) {
  if (static_cast<std::size_t>(field->N) != base.domain().dim())
    throw DimensionError("scaling experiment: field dimension N differs from the grid dimension");
  if (lambdas.empty()) lambdas = default_lambdas(base.domain());
  ScalingExperiment e{std::move(base), std::move(lambdas), w, std::move(field), b, {}, {}};
  for (double l : e.lambdas) e.sides.push_back(embedding_sides(scale_function(e.base, l), *e.field, b, w));
  return e;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw NumericalError("fit_line needs >= 2 matching points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (!(sxx > 0)) throw NumericalError("degenerate fit: zero variance");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.reliable = f.residual <= kFitResidual;
  return f;
}

std::vector<SlopeFit> exponent_scan(const ScalingExperiment& e) {
  const auto& L = e.lambdas;
  if (L.size() < 4) throw DomainError("exponent_scan needs at least 4 lambdas");
  if (e.sides.size() != L.size()) throw DimensionError("exponent_scan: sides missing");
  const auto [lmin, lmax] = std::minmax_element(L.begin(), L.end());
  if (*lmax < 10 * *lmin) throw DomainError("exponent_scan: lambdas must span a decade");

  const ExponentField& f = *e.field;
  const double N = f.N, r = e.b.r, s = e.b.s, al = e.b.alpha;
  const bool radial = e.weight == WeightMode::Radial;
  const double nan = std::nan("");
  const bool cst = f.is_constant();
  const double p = cst ? f.p[0] : nan, q = cst ? f.q[0] : nan;
  struct Q {
    const char* name;
    double EmbeddingSides::*member;
    double predicted;
  };
  const Q qs[] = {
      {"lhs_r", &EmbeddingSides::lhs_r, -N / r},
      {"lhs_s", &EmbeddingSides::lhs_s, radial ? -(al + N) / s : -N / s},
      {"rhs_p", &EmbeddingSides::rhs_p, (p - N) / p},
      {"rhs_q", &EmbeddingSides::rhs_q, radial ? (q - N - 1) / q : (q - N) / q},
  };
  std::vector<double> x;
  for (double l : L) x.push_back(std::log(l));
  std::vector<SlopeFit> out;
  for (const auto& qq : qs) {
    std::vector<double> y;
    for (const auto& sd : e.sides) {
      const double v = sd.*qq.member;
      if (!(v > 0)) throw NumericalError(std::string("exponent_scan: ") + qq.name + " vanishes");
      y.push_back(std::log(v));
    }
    SlopeFit fit = fit_line(x, y);
    fit.quantity = qq.name;
    fit.predicted = qq.predicted;
    out.push_back(fit);
  }
  return out;
}

OptimalityReport optimality_check(int N, double p, double q, double r, double s, double alpha) {
  if (!(1 < p && p < q && q < N)) throw HypothesisError("optimality_check needs 1 < p < q < N");
  constexpr double rel = 1e-12;
  OptimalityReport o;
  o.p_star = sobolev_exponent(N, p);
  o.q_star = sobolev_exponent(N, q);
  o.r_ok = r <= o.p_star * (1 + rel);
  o.s_ok = s <= o.q_star * (1 + rel);
  o.alpha_ok = alpha >= o.q_star / q * (1 - rel);
  o.epsilon = 1 + 1.0 / N - q / p;
  o.alpha_threshold = s / q - double(N) * N * o.epsilon / (N - q);
  return o;
}

}  // namespace musielak

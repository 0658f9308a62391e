#include "musielak/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "musielak/errors.hpp"

namespace musielak {

GridDomain::GridDomain(std::vector<std::size_t> shape, std::vector<double> lower,
                       std::vector<double> upper)
    : shape_(std::move(shape)), lower_(std::move(lower)), upper_(std::move(upper)) {
  const std::size_t d = shape_.size();
  if (d == 0 || d > kMaxDim)
    throw DimensionError("grid dimension must be 1, 2 or 3, got " + std::to_string(d));
  if (lower_.size() != d || upper_.size() != d)
    throw DimensionError("grid lower/upper length does not match shape");
  std::size_t total = 1;
  spacing_.resize(d);
  stride_.resize(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (shape_[a] < 2) throw DomainError("grid needs at least 2 nodes per axis");
    if (!(upper_[a] > lower_[a]) || !std::isfinite(lower_[a]) || !std::isfinite(upper_[a]))
      throw DomainError("grid bounds must be finite with upper > lower");
    spacing_[a] = (upper_[a] - lower_[a]) / static_cast<double>(shape_[a] - 1);
    stride_[a] = total;
    total *= shape_[a];
  }

  volume_weight_.assign(total, 0.0);
  facet_weight_.assign(total, 0.0);
  boundary_.assign(total, 0);
  for (std::size_t node = 0; node < total; ++node) {
    Index idx = multi_index(node);
    std::array<bool, kMaxDim> at_end{};
    std::array<double, kMaxDim> w{};
    for (std::size_t a = 0; a < d; ++a) {
      at_end[a] = idx[a] == 0 || idx[a] + 1 == shape_[a];
      w[a] = at_end[a] ? 0.5 * spacing_[a] : spacing_[a];
    }
    double vol = 1.0;
    for (std::size_t a = 0; a < d; ++a) vol *= w[a];
    volume_weight_[node] = vol;

    double facet = 0.0;
    bool bnd = false;
    for (std::size_t a = 0; a < d; ++a) {
      if (!at_end[a]) continue;
      bnd = true;
      double fw = 1.0;
      for (std::size_t b = 0; b < d; ++b)
        if (b != a) fw *= w[b];
      facet += fw;
    }
    facet_weight_[node] = facet;
    boundary_[node] = bnd ? 1 : 0;
    (bnd ? boundary_nodes_ : interior_nodes_).push_back(node);
  }
}

GridDomain GridDomain::unit_box(std::size_t dim, std::size_t n) {
  return GridDomain(std::vector<std::size_t>(dim, n), std::vector<double>(dim, 0.0),
                    std::vector<double>(dim, 1.0));
}

GridDomain GridDomain::centered_box(std::size_t dim, std::size_t n, double half_width) {
  return GridDomain(std::vector<std::size_t>(dim, n),
                    std::vector<double>(dim, -half_width),
                    std::vector<double>(dim, half_width));
}

double GridDomain::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.end());
}

double GridDomain::cell_measure() const {
  double m = 1.0;
  for (double h : spacing_) m *= h;
  return m;
}

double GridDomain::measure() const {
  return std::accumulate(volume_weight_.begin(), volume_weight_.end(), 0.0);
}

double GridDomain::boundary_measure() const {
  return std::accumulate(facet_weight_.begin(), facet_weight_.end(), 0.0);
}

GridDomain::Index GridDomain::multi_index(std::size_t node) const {
  Index idx{};
  for (std::size_t a = 0; a < dim(); ++a) {
    idx[a] = node % shape_[a];
    node /= shape_[a];
  }
  return idx;
}

std::size_t GridDomain::linear_index(const Index& idx) const {
  std::size_t node = 0;
  for (std::size_t a = 0; a < dim(); ++a) node += idx[a] * stride_[a];
  return node;
}

GridDomain::Point GridDomain::coordinates(std::size_t node) const {
  Point x{};
  Index idx = multi_index(node);
  for (std::size_t a = 0; a < dim(); ++a)
    x[a] = idx[a] + 1 == shape_[a] ? upper_[a] : lower_[a] + spacing_[a] * idx[a];
  return x;
}

bool GridDomain::operator==(const GridDomain& o) const {
  return shape_ == o.shape_ && lower_ == o.lower_ && upper_ == o.upper_;
}

void require_same_domain(const GridDomain& a, const GridDomain& b) {
  if (&a != &b && a != b) throw DimensionError("grid functions live on different grids");
}

GridFunction::GridFunction(std::shared_ptr<const GridDomain> domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw DimensionError("grid function without a domain");
  if (values_.size() != domain_->size())
    throw DimensionError("grid function has " + std::to_string(values_.size()) +
                         " values for " + std::to_string(domain_->size()) + " nodes");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("grid function value is not finite");
}

GridFunction::GridFunction(std::shared_ptr<const GridDomain> domain)
    : GridFunction(domain, std::vector<double>(domain ? domain->size() : 0, 0.0)) {}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

GridFunction GridFunction::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return GridFunction(domain_, std::move(v));
}

std::vector<std::array<double, GridDomain::kMaxDim>> GridFunction::gradient() const {
  const GridDomain& g = *domain_;
  std::vector<std::array<double, GridDomain::kMaxDim>> out(size());
  for (std::size_t node = 0; node < size(); ++node) {
    auto idx = g.multi_index(node);
    auto& d = out[node];
    d.fill(0.0);
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const std::size_t st = g.stride(a);
      const double h = g.spacing()[a];
      if (idx[a] == 0)
        d[a] = (values_[node + st] - values_[node]) / h;
      else if (idx[a] + 1 == g.shape()[a])
        d[a] = (values_[node] - values_[node - st]) / h;
      else
        d[a] = (values_[node + st] - values_[node - st]) / (2.0 * h);
    }
  }
  return out;
}

std::vector<double> GridFunction::gradient_magnitude() const {
  auto grad = gradient();
  std::vector<double> m(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i)
    m[i] = std::sqrt(grad[i][0] * grad[i][0] + grad[i][1] * grad[i][1] +
                     grad[i][2] * grad[i][2]);
  return m;
}

}  // namespace musielak

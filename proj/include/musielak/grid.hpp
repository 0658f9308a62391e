#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace musielak {

/// Rectangular lattice [lower, upper] in 1 to 3 dimensions with uniform
/// spacing per axis. Nodes are stored with axis 0 varying fastest.
///
/// Every node carries a volume weight (tensor trapezoid rule, so the weights
/// sum to the exact box volume) and, if it lies on the boundary, a facet
/// weight: the (d-1)-dimensional trapezoid weight summed over the faces the
/// node touches. On a box the facet weights sum to the exact surface measure.
/// In 1D the boundary is the two endpoints with counting measure.
class GridDomain {
 public:
  static constexpr std::size_t kMaxDim = 3;
  using Point = std::array<double, kMaxDim>;
  using Index = std::array<std::size_t, kMaxDim>;

  GridDomain(std::vector<std::size_t> shape, std::vector<double> lower,
             std::vector<double> upper);

  /// Unit box [0,1]^dim with n nodes per axis.
  static GridDomain unit_box(std::size_t dim, std::size_t n);
  /// Box [-half_width, half_width]^dim with n nodes per axis.
  static GridDomain centered_box(std::size_t dim, std::size_t n,
                                 double half_width);

  std::size_t dim() const { return shape_.size(); }
  std::size_t size() const { return volume_weight_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<double>& spacing() const { return spacing_; }
  double max_spacing() const;

  /// Product of the spacings, the measure of one full lattice cell.
  double cell_measure() const;

  std::span<const double> volume_weights() const { return volume_weight_; }
  std::span<const double> facet_weights() const { return facet_weight_; }
  double volume_weight(std::size_t node) const { return volume_weight_[node]; }
  double facet_weight(std::size_t node) const { return facet_weight_[node]; }

  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
  const std::vector<std::size_t>& boundary_nodes() const {
    return boundary_nodes_;
  }
  const std::vector<std::size_t>& interior_nodes() const {
    return interior_nodes_;
  }

  double measure() const;           ///< sum of volume weights
  double boundary_measure() const;  ///< sum of facet weights

  Index multi_index(std::size_t node) const;
  std::size_t linear_index(const Index& idx) const;
  std::size_t stride(std::size_t axis) const { return stride_[axis]; }
  Point coordinates(std::size_t node) const;

  bool operator==(const GridDomain& other) const;
  bool operator!=(const GridDomain& other) const { return !(*this == other); }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> spacing_;
  std::vector<std::size_t> stride_;
  std::vector<double> volume_weight_;
  std::vector<double> facet_weight_;
  std::vector<char> boundary_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<std::size_t> interior_nodes_;
};

/// Real values on the nodes of a shared GridDomain.
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const GridDomain> domain,
               std::vector<double> values);
  /// Zero function.
  explicit GridFunction(std::shared_ptr<const GridDomain> domain);

  template <class F>
  static GridFunction from_function(std::shared_ptr<const GridDomain> domain,
                                    F&& f) {
    std::vector<double> v(domain->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(domain->coordinates(i));
    return GridFunction(std::move(domain), std::move(v));
  }

  const GridDomain& domain() const { return *domain_; }
  const std::shared_ptr<const GridDomain>& domain_ptr() const {
    return domain_;
  }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double max() const;
  double min() const;
  double max_abs() const;
  bool is_zero() const;

  GridFunction scaled(double c) const;
  GridFunction negated() const { return scaled(-1.0); }

  /// Nodal gradient: central differences at interior positions of each axis,
  /// first-order one-sided differences at the two ends of the axis.
  std::vector<std::array<double, GridDomain::kMaxDim>> gradient() const;
  /// Euclidean norm of gradient() at every node.
  std::vector<double> gradient_magnitude() const;

 private:
  std::shared_ptr<const GridDomain> domain_;
  std::vector<double> values_;
};

/// Throws DimensionError unless both functions live on equal domains.
void require_same_domain(const GridDomain& a, const GridDomain& b);

}  // namespace musielak

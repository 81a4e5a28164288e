#ifndef ACCRETA_GRID_HPP
#define ACCRETA_GRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "accreta/error.hpp"

namespace accreta {

/// Physical position. 2D grids leave the third component at zero.
using Point = Eigen::Vector3d;
using Index3 = std::array<int, 3>;
using NodeId = std::int64_t;

/**
 * Uniform rectilinear lattice in two or three dimensions.
 *
 * Node (i,j,k) sits at origin + h*(i,j,k). Linear ids run with i fastest.
 * A 2D grid stores shape[2] == 1.
 */
class Grid {
 public:
  Grid() = default;
  Grid(int dim, const Point& origin, double spacing, const Index3& shape);

  int dim() const { return dim_; }
  const Point& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const Index3& shape() const { return shape_; }
  NodeId size() const { return static_cast<NodeId>(shape_[0]) * shape_[1] * shape_[2]; }
  /// Nodal quadrature weight h^dim.
  double cell_volume() const { return std::pow(spacing_, dim_); }

  bool contains(const Index3& idx) const {
    for (int a = 0; a < 3; ++a)
      if (idx[a] < 0 || idx[a] >= shape_[a]) return false;
    return true;
  }
  NodeId node(const Index3& idx) const {
    return idx[0] + static_cast<NodeId>(shape_[0]) * (idx[1] + static_cast<NodeId>(shape_[1]) * idx[2]);
  }
  Index3 index(NodeId n) const {
    Index3 idx;
    idx[0] = static_cast<int>(n % shape_[0]);
    n /= shape_[0];
    idx[1] = static_cast<int>(n % shape_[1]);
    idx[2] = static_cast<int>(n / shape_[1]);
    return idx;
  }
  Point position(const Index3& idx) const {
    return origin_ + spacing_ * Point(idx[0], idx[1], idx[2]);
  }
  Point position(NodeId n) const { return position(index(n)); }

  /// Continuous lattice coordinates of a physical point.
  Eigen::Vector3d lattice_coords(const Point& p) const { return (p - origin_) / spacing_; }

  /// Node nearest to p, clamped into the grid.
  NodeId nearest_node(const Point& p) const;

  /// Calls f(neighbor) for every in-grid axis neighbor (2*dim at most).
  template <typename F>
  void for_each_axis_neighbor(NodeId n, F&& f) const {
    const Index3 idx = index(n);
    for (int a = 0; a < dim_; ++a) {
      for (int s : {-1, 1}) {
        Index3 nb = idx;
        nb[a] += s;
        if (contains(nb)) f(node(nb));
      }
    }
  }

  /// True when the node lies on the outer frame of the grid.
  bool on_frame(NodeId n) const;

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && origin_ == other.origin_ && spacing_ == other.spacing_ &&
           shape_ == other.shape_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_ = 2;
  Point origin_ = Point::Zero();
  double spacing_ = 1.0;
  Index3 shape_{3, 3, 1};
};

/// Node subset of a grid. Connectivity uses axis adjacency.
class Mask {
 public:
  Mask() = default;
  /// All-false mask.
  explicit Mask(const Grid& grid);
  Mask(const Grid& grid, std::vector<std::uint8_t> membership);

  const Grid& grid() const { return grid_; }
  bool contains(NodeId n) const { return bits_[static_cast<std::size_t>(n)] != 0; }
  bool contains(const Index3& idx) const { return grid_.contains(idx) && contains(grid_.node(idx)); }
  NodeId count() const { return count_; }
  bool empty() const { return count_ == 0; }
  /// Flood-fill result from the first member; false for the empty mask.
  bool connected() const { return connected_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::vector<NodeId> members() const;

  Mask operator|(const Mask& other) const;
  Mask operator&(const Mask& other) const;
  /// Set difference this \ other.
  Mask operator-(const Mask& other) const;
  bool subset_of(const Mask& other) const;
  bool operator==(const Mask& other) const { return grid_ == other.grid_ && bits_ == other.bits_; }

 private:
  void refresh();

  Grid grid_;
  std::vector<std::uint8_t> bits_;
  NodeId count_ = 0;
  bool connected_ = false;
};

/**
 * Nodal scalar data on a grid. Nodes outside the support carry the absent
 * marker (NaN); the support is exactly the set of finite entries.
 */
template <typename Scalar>
class Field {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  static constexpr Scalar absent() { return std::numeric_limits<Scalar>::quiet_NaN(); }

  Field() = default;
  explicit Field(const Grid& grid) : grid_(grid), values_(Vector::Constant(grid.size(), absent())) {}
  Field(const Grid& grid, Vector values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error("field size does not match grid");
  }

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  bool has(NodeId n) const { return std::isfinite(values_[n]); }
  Scalar operator[](NodeId n) const { return values_[n]; }
  Scalar& operator[](NodeId n) { return values_[n]; }

  Mask support() const {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(grid_.size()));
    for (NodeId n = 0; n < grid_.size(); ++n) bits[static_cast<std::size_t>(n)] = has(n) ? 1 : 0;
    return Mask(grid_, std::move(bits));
  }

  /// Copy with absent entries replaced by `fill` (the trivial extension for fill = 0).
  Vector extended(Scalar fill = Scalar(0)) const {
    return values_.unaryExpr([fill](Scalar x) { return std::isfinite(x) ? x : fill; });
  }

 private:
  Grid grid_;
  Vector values_;
};

using ScalarField = Field<double>;

using Predicate = std::function<bool(const Point&)>;

/// Membership by strict evaluation at node positions; throws on an empty result.
Mask build_mask_from_predicate(const Grid& grid, const Predicate& predicate);

/// {v < t} restricted to the support of v; empty for t <= 0 when v >= 0.
Mask sublevel(const ScalarField& v, double t);

/// Members with at least one axis neighbor outside the mask or outside the grid.
std::vector<NodeId> boundary_nodes(const Mask& m);

/// Connected component (axis adjacency) of `m` containing any of the seeds.
Mask component_containing(const Mask& m, const std::vector<NodeId>& seeds);

/// One violated modelling assumption, named by a stable identifier.
struct Issue {
  std::string assumption;
  std::string message;
};

/// Geometric data of the growth problem on a grid.
struct DomainSpec {
  Mask omega;
  Mask v0;
  std::vector<NodeId> gamma;
  NodeId x0 = 0;
  double L = 1.0;
  /// John constant of the seed set with respect to x0.
  double kappa0 = 1.0;

  const Grid& grid() const { return omega.grid(); }
  /// Violated geometric assumptions; empty when valid.
  std::vector<Issue> validate() const;
};

}  // namespace accreta

#endif  // ACCRETA_GRID_HPP

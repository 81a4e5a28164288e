#ifndef ACCRETA_HJ_HPP
#define ACCRETA_HJ_HPP

#include <limits>
#include <optional>
#include <vector>

#include "accreta/grid.hpp"
#include "accreta/hamiltonian.hpp"

namespace accreta {

/// Integer lattice offset used as a graph edge.
struct StencilOffset {
  Index3 offset{0, 0, 0};
  double length = 0.0;            // |offset| in lattice units
  Point direction = Point::Zero();  // offset / |offset|
  /// Lattice offsets (from the edge source) of the nodes of the smallest cell holding the midpoint.
  std::vector<Index3> midpoint_cell;
};

/// gcd-reduced nonzero offsets with Chebyshev norm <= radius, in a fixed order.
std::vector<StencilOffset> make_stencil(int dim, int radius);

/// max over unit z of (stencil polygonal norm of z) - 1: relative length excess of lattice paths.
double stencil_length_excess(int dim, int radius);

/**
 * Anisotropic edge weights for the attachment solve: the support function
 * evaluated with a frozen per-node activation a(x), read at edge midpoints by
 * multilinear interpolation.
 */
class MetricField {
 public:
  MetricField(const Grid& grid, SupportEvaluator support, Eigen::VectorXd activation);
  /// Metric with zero activation everywhere.
  MetricField(const Grid& grid, SupportEvaluator support);

  const Grid& grid() const { return grid_; }
  const SupportEvaluator& support() const { return support_; }
  const Eigen::VectorXd& activation() const { return activation_; }
  double sigma_lower() const { return support_.model().sigma_lower; }
  double sigma_upper() const { return support_.model().sigma_upper; }

  /// Activation at the midpoint of the edge from `from` along `off` (average over the midpoint cell).
  double midpoint_activation(const Index3& from, const StencilOffset& off) const;
  /// Physical cost h|o| * sigma(mid, a(mid), o/|o|) of the edge from `from` along `off`.
  double edge_cost(const Index3& from, const StencilOffset& off) const;

 private:
  Grid grid_;
  SupportEvaluator support_;
  Eigen::VectorXd activation_;
};

/// Time-of-attachment field with its shortest-path tree.
struct AttachmentField {
  ScalarField v;
  /// Predecessor on an optimal lattice path, -1 for sources and unreachable nodes.
  std::vector<NodeId> predecessor;
  int stencil_radius = 2;

  const Grid& grid() const { return v.grid(); }
};

/// True when the edge from `from` along `off` stays inside omega (endpoints and midpoint cell).
bool edge_admissible(const Mask& omega, const Index3& from, const StencilOffset& off);

/**
 * Label-setting shortest paths from every V0 node (label 0) over omega, with
 * edge weights from `metric`. Unreachable omega nodes stay absent.
 */
AttachmentField solve_attachment(const DomainSpec& domain, const MetricField& metric, int stencil_radius = 2);

struct Curve {
  std::vector<NodeId> nodes;  // from x back to the seed set
  std::vector<Point> vertices;
  double length = 0.0;
};

/// Follows predecessors from x to the seed set.
Curve backtrack_curve(const AttachmentField& a, NodeId x);

struct GradientReport {
  double max_gradient = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double fraction_exceeding = 0.0;
  NodeId nodes_checked = 0;
  bool pass = true;
};

/// Largest |grad v| / sigma^* that centered differences can report on a lattice-norm distance field.
double gradient_mixing_constant(int dim, int radius);

/// Slack used by discrete_gradient_bound for a given stencil.
double gradient_slack(double sigma_upper, double L, double h, int dim, int stencil_radius);

/// Centered-difference |grad v| on interior support nodes against sigma^* L + slack.
GradientReport discrete_gradient_bound(const AttachmentField& a, double L, double sigma_upper);

/// sup over omega and B_R (centered at the coordinate origin) of |v - v'| where v' is re-solved on `metric`.
double representation_residual(const DomainSpec& domain, const MetricField& metric, const AttachmentField& a,
                               double R = std::numeric_limits<double>::infinity());

/// sup of |a - b| over nodes in both supports inside B_R; +inf when the supports differ there.
double sup_difference(const ScalarField& a, const ScalarField& b, double R = std::numeric_limits<double>::infinity());

}  // namespace accreta

#endif  // ACCRETA_HJ_HPP

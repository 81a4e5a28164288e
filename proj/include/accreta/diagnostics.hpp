#ifndef ACCRETA_DIAGNOSTICS_HPP
#define ACCRETA_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "accreta/grid.hpp"
#include "accreta/hj.hpp"

namespace accreta {

/**
 * Exact squared Euclidean distance (in lattice units) from every node to the
 * nearest member of `target`; +inf everywhere for an empty target. Separable
 * lower-envelope transform, one pass per axis.
 */
std::vector<double> squared_distance_transform(const Mask& target);

/// Distance (physical units) from every node to the nearest node outside `m`, counting
/// lattice points beyond the grid frame as outside.
std::vector<double> distance_to_complement(const Mask& m);

/// d_H(A,B) = max(e(A,B), e(B,A)) in physical units; throws on an empty mask.
double hausdorff(const Mask& a, const Mask& b);

/// Measured quantity against a bound with explicit discretization slack.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  /// Lower-bound checks pass when measured >= bound - slack, the others when measured <= bound + slack.
  bool lower_bound = false;
  bool pass = true;
};

Check make_check(std::string name, double measured, double bound, double slack, bool lower_bound = false);

struct TimePair {
  double s = 0.0;
  double t = 0.0;
  double hausdorff = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = true;
  /// |V(t) \ V(s)| by nodal quadrature.
  double measure_difference = 0.0;
};

struct TimeLipschitzReport {
  std::vector<TimePair> pairs;
  bool pass = true;
  /// Least-squares fit |V(t)\V(s)| ~ c (t-s)^mu over pairs with positive measure (NaN when < 2 pairs).
  double holder_c = 0.0;
  double holder_mu = 0.0;
};

/// d_H(V(t),V(s)) <= (t-s)/sigma_* + 2h for every pair s < t of the sampled times.
TimeLipschitzReport check_time_lipschitz(const AttachmentField& a, const std::vector<double>& times,
                                         double sigma_lower);

struct JohnEstimate {
  /// min over samples and curve points of d(gamma(s), dV)/s, capped at 1.
  double estimate = 1.0;
  NodeId worst_sample = -1;
  /// Curve of the worst sample, from the sample to x0, with arc lengths.
  std::vector<Point> curve;
  std::vector<double> arc_length;
  NodeId samples_used = 0;
};

/**
 * Lower estimate of the John constant of `mask` with respect to x0. Each sampled
 * boundary node x is joined to x0 by the reversed optimal lattice path to the seed
 * set followed by a curve inside the seed set; the ratio d(gamma(s), dV)/s is
 * evaluated along it with a triangle-inequality lower bound between nodes.
 */
JohnEstimate john_constant_estimate(const Mask& mask, NodeId x0, const AttachmentField& a, const Mask& seed,
                                    int samples = 64);

/// Re-checks d(gamma(s), dV) >= estimate * s at every stored curve vertex.
bool verify_john_curve(const Mask& mask, const JohnEstimate& est);

struct BoxCount {
  std::vector<double> scales;
  std::vector<double> counts;
  double slope = 0.0;
};

/// Least-squares slope of log N(r) against log(1/r); scales below 2h are ignored.
BoxCount box_counting_slope(const Grid& grid, const std::vector<NodeId>& boundary, const std::vector<double>& scales);

/// Dyadic scales 2h, 4h, ... up to half the bounding extent of the node set.
std::vector<double> dyadic_scales(const Grid& grid, const std::vector<NodeId>& nodes, int min_count = 3);

/// d(x0, dV0): distance from x0 to the nearest node outside the seed set.
double seed_inradius(const Mask& seed, NodeId x0);

struct TheoryConstants {
  double inv_sigma_lower = 0.0;
  double kappa_bar = 0.0;
  double c1 = 0.0;
  double R = 0.0;
  double c3_offset = 0.0;  // d(x0,dV0)/kappa0 + |x0|
};

TheoryConstants theory_constants(const DomainSpec& domain, double sigma_lower, double sigma_upper, double R);

/// c3(t) = t/sigma_* + d(x0,dV0)/kappa0 + |x0|.
inline double c3(const TheoryConstants& k, double t) { return t * k.inv_sigma_lower + k.c3_offset; }

struct RegularityReport {
  TheoryConstants constants;
  TimeLipschitzReport lipschitz;
  std::vector<double> john_times;
  std::vector<double> john_estimates;
  double box_counting_time = 0.0;
  BoxCount box_counting;
  std::vector<Check> checks;

  bool pass() const;
};

struct BoundCheckOptions {
  int curve_samples = 100;
  int john_samples = 64;
  /// Radius of the window ball B_R (centered at the coordinate origin).
  double R = 0.0;
  double T = 1.0;
  int M = 20;
};

/**
 * Every quantitative estimate on a solved attachment field: optimal-curve
 * lengths, the gradient bound, the window bound on v, Hausdorff-Lipschitz
 * growth, window containment, John estimates and the box-counting slope.
 */
RegularityReport regularity_report(const DomainSpec& domain, const AttachmentField& a, double sigma_lower,
                                   double sigma_upper, const BoundCheckOptions& opt);

}  // namespace accreta

#endif  // ACCRETA_DIAGNOSTICS_HPP

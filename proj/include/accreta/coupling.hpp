#ifndef ACCRETA_COUPLING_HPP
#define ACCRETA_COUPLING_HPP

#include <functional>
#include <string>
#include <vector>

#include "accreta/convolution.hpp"
#include "accreta/diagnostics.hpp"
#include "accreta/elliptic.hpp"
#include "accreta/hj.hpp"

namespace accreta {

struct CouplingConfig {
  double T = 1.0;
  int M = 20;
  /// Radius of the window B_R (centered at the coordinate origin); <= 0 covers the whole grid.
  double R = 0.0;
  double tol = 1e-3;
  int max_iter = 50;
  /// Weight of the freshly composed activation; 1 is the plain scheme.
  double theta = 1.0;
  int stencil_radius = 2;
  double cg_tol = 1e-8;
  int threads = 1;
  /// Activation at nodes attached after T; the default rejects them.
  HorizonPolicy past_horizon = HorizonPolicy::error;

  std::vector<Issue> validate() const;
};

struct CouplingProblem {
  DomainSpec domain;
  SupportEvaluator support;
  KernelPair kernels;
  CouplingConfig config;
};

/// Effective window radius: config.R, or the largest node norm when R <= 0.
double window_radius(const Grid& grid, const CouplingConfig& config);

/**
 * Growth is confined to omega, so the window can only truncate it when omega
 * reaches the grid frame. Reports the containment assumption when that happens
 * and c3(T) leaves the largest origin ball inside the grid.
 */
std::vector<Issue> window_warnings(const DomainSpec& domain, double sigma_lower, double sigma_upper,
                                   const CouplingConfig& config);

struct HausdorffDelta {
  double t = 0.0;
  double distance = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct IterationRecord {
  int j = 0;
  /// sup over omega and B_R of |v_j - v_{j-1}|.
  double delta = 0.0;
  std::vector<HausdorffDelta> hausdorff;
  /// max over sampled t of (max |x| on V_j(t)) - c3(t).
  double containment_excess = 0.0;
  bool containment_pass = true;
  double v_max = 0.0;
  /// Nodes of v_j with v_j > T (their activation is held at Ku(x, T) under the hold policy).
  NodeId beyond_horizon = 0;
  double c1 = 0.0;
  double max_slice_residual = 0.0;
  int cg_iterations = 0;
  double seconds = 0.0;
};

struct CoupledState {
  int j = 0;
  /// Activation a(x) frozen into the metric that produced v.
  Eigen::VectorXd activation;
  AttachmentField v;
  GrowthSolution u;
  ActivationTrace ku;
  std::vector<IterationRecord> history;
};

enum class Verdict { converged, max_iter_reached };

std::string to_string(Verdict v);

struct CouplingResult {
  CoupledState state;
  Verdict verdict = Verdict::max_iter_reached;
  /// sup |v - v'| where v' is re-solved on the metric built from the final state; NaN unless converged.
  double representation_residual = 0.0;
  double seconds = 0.0;
};

/// v_0 with the u-argument frozen at zero, then u_0 and Ku_0.
CoupledState initialize(const CouplingProblem& p);

/// One sweep v_j -> v_{j+1} -> u_{j+1} -> Ku_{j+1} with the metric frozen at iterate j.
CoupledState step(const CouplingProblem& p, const CoupledState& s);

/// Activation theta Ku_j(x, v_j(x)) + (1 - theta) a_prev(x) for the next metric.
Eigen::VectorXd next_activation(const CouplingProblem& p, const CoupledState& s);

using CouplingObserver = std::function<void(const CoupledState&)>;

/// Iterates until delta < tol or max_iter sweeps; observer sees every state including the initial one.
CouplingResult run(const CouplingProblem& p, const CouplingObserver& observer = {});

}  // namespace accreta

#endif  // ACCRETA_COUPLING_HPP

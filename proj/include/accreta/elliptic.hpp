#ifndef ACCRETA_ELLIPTIC_HPP
#define ACCRETA_ELLIPTIC_HPP

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "accreta/grid.hpp"

namespace accreta {

/// -Lap u = rhs on `mask`, u = 0 on `dirichlet`, natural (Neumann) condition elsewhere.
struct PoissonProblem {
  Mask mask;
  std::vector<NodeId> dirichlet;
  double rhs = 1.0;
};

/// Finite-volume system restricted to the unknown (non-Dirichlet) nodes of the solve region.
struct PoissonSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  /// Grid node of each unknown.
  std::vector<NodeId> unknowns;
  /// Gamma-connected component that is actually solved.
  Mask region;
  std::vector<NodeId> dirichlet;
  /// Mask nodes outside the Gamma-connected component.
  NodeId dropped = 0;
};

/**
 * Assembles the link-dropping finite-volume Laplacian: every axis link between
 * two region nodes carries conductance h^(dim-2); links leaving the region are
 * absent, which is the discrete natural boundary condition. Dirichlet nodes are
 * eliminated with value zero and the unit source integrates to h^dim per node.
 */
PoissonSystem assemble_poisson(const PoissonProblem& p);

struct PoissonSolution {
  ScalarField u;
  int iterations = 0;
  double residual = 0.0;
  NodeId unknowns = 0;
  NodeId dropped = 0;
};

/// Solves by conjugate gradients to relative residual cg_tol; `guess` warm-starts (absent nodes read as 0).
PoissonSolution solve_poisson(const PoissonProblem& p, double cg_tol = 1e-8, int max_iter = -1,
                              const ScalarField* guess = nullptr);

/// Discrete Dirichlet energy: sum over links between supported nodes of h^dim ((u_b - u_a)/h)^2.
double dirichlet_energy(const ScalarField& u);
/// Nodal quadrature of u over its support.
double integral(const ScalarField& u);
/// ||u||_{H^1} / ||grad u||_{L^2} with forward-difference links and nodal quadrature; 1 when grad u = 0.
double poincare_ratio(const ScalarField& u, double h);

/// u(., t_m) on the growing sublevels, t_m = m T / M for m = 0..M.
struct TimeField {
  Grid grid;
  std::vector<double> times;
  std::vector<ScalarField> slices;

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct SliceReport {
  double t = 0.0;
  NodeId unknowns = 0;
  NodeId dropped = 0;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  double integral = 0.0;
  double poincare = 1.0;
};

struct GrowthSolution {
  TimeField u;
  std::vector<SliceReport> reports;
};

/// Slice mask at time t: ({v < t} with V0 and Gamma) inside omega.
Mask growth_mask(const ScalarField& v, const DomainSpec& domain, double t);

/**
 * Solves every slice. The t = 0 slice uses the seed set itself (the limit of
 * {v < t} as t decreases to 0). Sequential runs warm-start each slice from the
 * previous one; with threads > 1 slices are independent and start from zero.
 */
GrowthSolution solve_on_growth(const ScalarField& v, const DomainSpec& domain, double T, int M, double cg_tol = 1e-8,
                               int threads = 1);

}  // namespace accreta

#endif  // ACCRETA_ELLIPTIC_HPP

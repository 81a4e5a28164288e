#include "accreta/elliptic.hpp"

#include <cmath>
#include <string>

#include "accreta/cg.hpp"
#include "accreta/log.hpp"
#include "accreta/parallel.hpp"

namespace accreta {

PoissonSystem assemble_poisson(const PoissonProblem& p) {
  const Grid& g = p.mask.grid();
  std::vector<NodeId> dirichlet;
  for (NodeId n : p.dirichlet)
    if (n >= 0 && n < g.size() && p.mask.contains(n)) dirichlet.push_back(n);
  if (dirichlet.empty()) throw SolverError("non-coercive problem: no Dirichlet node inside the mask");

  PoissonSystem sys;
  sys.region = component_containing(p.mask, dirichlet);
  sys.dropped = p.mask.count() - sys.region.count();
  sys.dirichlet = dirichlet;

  std::vector<std::uint8_t> is_dirichlet(static_cast<std::size_t>(g.size()), 0);
  for (NodeId n : dirichlet) is_dirichlet[static_cast<std::size_t>(n)] = 1;
  std::vector<NodeId> slot(static_cast<std::size_t>(g.size()), -1);
  for (NodeId n = 0; n < g.size(); ++n) {
    if (sys.region.contains(n) && !is_dirichlet[static_cast<std::size_t>(n)]) {
      slot[static_cast<std::size_t>(n)] = static_cast<NodeId>(sys.unknowns.size());
      sys.unknowns.push_back(n);
    }
  }

  const double h = g.spacing();
  const double conductance = std::pow(h, g.dim() - 2);
  const auto m = static_cast<Eigen::Index>(sys.unknowns.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(sys.unknowns.size() * static_cast<std::size_t>(2 * g.dim() + 1));
  for (Eigen::Index row = 0; row < m; ++row) {
    const NodeId n = sys.unknowns[static_cast<std::size_t>(row)];
    double diag = 0.0;
    g.for_each_axis_neighbor(n, [&](NodeId nb) {
      if (!sys.region.contains(nb)) return;
      diag += conductance;
      const NodeId col = slot[static_cast<std::size_t>(nb)];
      if (col >= 0) triplets.emplace_back(row, col, -conductance);
    });
    triplets.emplace_back(row, row, diag);
  }
  sys.matrix.resize(m, m);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.rhs = Eigen::VectorXd::Constant(m, p.rhs * g.cell_volume());
  return sys;
}

PoissonSolution solve_poisson(const PoissonProblem& p, double cg_tol, int max_iter, const ScalarField* guess) {
  if (!(cg_tol > 0.0)) throw ValidationError("cg_tol must be positive");
  const PoissonSystem sys = assemble_poisson(p);
  const Grid& g = p.mask.grid();
  const auto m = static_cast<Eigen::Index>(sys.unknowns.size());
  if (max_iter < 0) max_iter = static_cast<int>(std::max<Eigen::Index>(10 * m, 10));

  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  if (guess) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const NodeId n = sys.unknowns[static_cast<std::size_t>(i)];
      if (guess->has(n)) x[i] = (*guess)[n];
    }
  }
  const CgResult<double> cg = conjugate_gradient<double>(sys.matrix, sys.rhs, x, cg_tol, max_iter);
  if (!cg.converged)
    throw SolverError("conjugate gradients did not converge: relative residual " + std::to_string(cg.relative_residual));

  PoissonSolution out{ScalarField(g), cg.iterations, cg.relative_residual, m, sys.dropped};
  for (NodeId n : sys.dirichlet) out.u[n] = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) out.u[sys.unknowns[static_cast<std::size_t>(i)]] = x[i];
  return out;
}

double dirichlet_energy(const ScalarField& u) {
  const Grid& g = u.grid();
  const double h = g.spacing();
  const double w = g.cell_volume() / (h * h);
  double e = 0.0;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (!u.has(n)) continue;
    const Index3 idx = g.index(n);
    for (int a = 0; a < g.dim(); ++a) {
      Index3 nb = idx;
      nb[a] += 1;
      if (!g.contains(nb)) continue;
      const NodeId m = g.node(nb);
      if (!u.has(m)) continue;
      const double d = u[m] - u[n];
      e += w * d * d;
    }
  }
  return e;
}

double integral(const ScalarField& u) {
  double s = 0.0;
  for (NodeId n = 0; n < u.grid().size(); ++n)
    if (u.has(n)) s += u[n];
  return s * u.grid().cell_volume();
}

double poincare_ratio(const ScalarField& u, double h) {
  const Grid& g = u.grid();
  if (std::abs(h - g.spacing()) > 1e-12 * g.spacing()) throw Error("spacing does not match the field's grid");
  const double grad = dirichlet_energy(u);
  if (grad == 0.0) return 1.0;
  double l2 = 0.0;
  for (NodeId n = 0; n < g.size(); ++n)
    if (u.has(n)) l2 += u[n] * u[n];
  l2 *= g.cell_volume();
  return std::sqrt((l2 + grad) / grad);
}

Mask growth_mask(const ScalarField& v, const DomainSpec& domain, double t) {
  Mask m = domain.v0 & domain.omega;
  if (t > 0.0) m = m | (sublevel(v, t) & domain.omega);
  std::vector<std::uint8_t> bits = m.bits();
  for (NodeId n : domain.gamma)
    if (domain.omega.contains(n)) bits[static_cast<std::size_t>(n)] = 1;
  return Mask(m.grid(), std::move(bits));
}

GrowthSolution solve_on_growth(const ScalarField& v, const DomainSpec& domain, double T, int M, double cg_tol,
                               int threads) {
  if (!(T > 0.0) || M < 1) throw ValidationError("growth solve needs T > 0 and M >= 1");
  const Grid& g = domain.grid();
  GrowthSolution out;
  out.u.grid = g;
  const auto count = static_cast<std::size_t>(M + 1);
  out.u.times.resize(count);
  for (std::size_t m = 0; m < count; ++m) out.u.times[m] = T * static_cast<double>(m) / M;
  out.u.slices.assign(count, ScalarField(g));
  out.reports.resize(count);

  auto solve_slice = [&](std::size_t m, const ScalarField* guess) {
    const double t = out.u.times[m];
    PoissonProblem p{growth_mask(v, domain, t), domain.gamma, 1.0};
    bool has_gamma = false;
    for (NodeId n : domain.gamma) has_gamma = has_gamma || p.mask.contains(n);
    if (!has_gamma) throw SolverError("slice at t=" + std::to_string(t) + " contains no Gamma node");
    PoissonSolution s = solve_poisson(p, cg_tol, -1, guess);
    if (s.dropped > 0)
      log_warning("slice t=" + std::to_string(t) + ": " + std::to_string(s.dropped) +
                  " nodes not connected to Gamma were left out");
    SliceReport& r = out.reports[m];
    r.t = t;
    r.unknowns = s.unknowns;
    r.dropped = s.dropped;
    r.iterations = s.iterations;
    r.residual = s.residual;
    r.energy = dirichlet_energy(s.u);
    r.integral = integral(s.u);
    r.poincare = poincare_ratio(s.u, g.spacing());
    out.u.slices[m] = std::move(s.u);
  };

  if (threads > 1) {
    parallel_for(count, threads, [&](std::size_t m) { solve_slice(m, nullptr); });
  } else {
    for (std::size_t m = 0; m < count; ++m) solve_slice(m, m > 0 ? &out.u.slices[m - 1] : nullptr);
  }
  return out;
}

}  // namespace accreta

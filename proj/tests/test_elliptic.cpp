#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "accreta/elliptic.hpp"
#include "accreta/log.hpp"
#include "support.hpp"

using namespace accreta;
using namespace accreta::testing;

TEST_SUITE("elliptic") {

TEST_CASE("mixed boundary strip reproduces x - x^2/2") {
  for (int N : {10, 20, 40}) {
    const Strip s = strip(N);
    const PoissonSolution sol = solve_poisson(s.problem, 1e-12);
    double err = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double x = i * s.h;
      err = std::max(err, std::abs(sol.u[s.grid.node({i, 1, 0})] - (x - 0.5 * x * x)));
    }
    CHECK(err <= 2.0 * s.h * s.h);
    CHECK(sol.u[s.grid.node({N, 1, 0})] == doctest::Approx(0.5).epsilon(s.h));
  }
}

TEST_CASE("Poincare ratio on the strip") {
  const Strip s = strip(80);
  const PoissonSolution sol = solve_poisson(s.problem, 1e-12);
  CHECK(poincare_ratio(sol.u, s.h) == doctest::Approx(std::sqrt(1.4)).epsilon(0.02));
  ScalarField zero(s.grid);
  zero[s.grid.node({0, 1, 0})] = 0.0;
  zero[s.grid.node({1, 1, 0})] = 0.0;
  CHECK(poincare_ratio(zero, s.h) == 1.0);
}

TEST_CASE("disk with Dirichlet boundary matches the radial solution") {
  const Grid g = square(1.1, 89);
  const Mask disk = ball(g, Point::Zero(), 1.0);
  const PoissonProblem p{disk, boundary_nodes(disk), 1.0};
  const PoissonSolution sol = solve_poisson(p, 1e-12);
  double err = 0.0;
  for (NodeId n : disk.members()) {
    const double r = g.position(n).norm();
    err = std::max(err, std::abs(sol.u[n] - 0.25 * (1.0 - r * r)));
    CHECK(sol.u[n] >= 0.0);
  }
  CHECK(err <= 3.0 * g.spacing());
}

TEST_CASE("random masks agree with a dense direct solve") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Grid g(2, Point::Zero(), 0.1, {10, 10, 1});
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.size()));
    for (auto& b : bits) b = (rng() % 10) < 7;
    bits[0] = 1;
    const Mask raw(g, bits);
    const Mask m = component_containing(raw, {0});
    const auto members = m.members();
    std::vector<NodeId> dir;
    for (int k = 0; k < 3; ++k) dir.push_back(members[rng() % members.size()]);
    std::sort(dir.begin(), dir.end());
    dir.erase(std::unique(dir.begin(), dir.end()), dir.end());
    const PoissonProblem p{m, dir, 1.0};
    const PoissonSolution sol = solve_poisson(p, 1e-14);
    REQUIRE(sol.unknowns <= 200);
    const Eigen::VectorXd oracle = dense_oracle(p);
    for (NodeId n : m.members()) {
      CHECK(sol.u[n] == doctest::Approx(oracle[n]).epsilon(1e-8).scale(1.0));
      CHECK(sol.u[n] >= 0.0);
    }
    const PoissonSystem sys = assemble_poisson(p);
    const Eigen::SparseMatrix<double> At = sys.matrix.transpose();
    CHECK((sys.matrix - At).norm() == 0.0);
  }
}

TEST_CASE("energy identity") {
  const double cg_tol = 1e-8;
  const Grid g = square(1.0, 41);
  const Mask m = build_mask_from_predicate(g, [](const Point& p) { return p.norm() < 0.9 && p[1] > -0.5; });
  std::vector<NodeId> dir;
  for (NodeId n : boundary_nodes(m))
    if (g.position(n)[1] < -0.44) dir.push_back(n);
  const PoissonSolution sol = solve_poisson({m, dir, 1.0}, cg_tol);
  const double e = dirichlet_energy(sol.u), i = integral(sol.u);
  CHECK(std::abs(e - i) <= 10.0 * cg_tol * i);
}

TEST_CASE("errors: no Dirichlet data and CG budget") {
  const Strip s = strip(20);
  PoissonProblem p = s.problem;
  p.dirichlet.clear();
  CHECK_THROWS_WITH_AS(solve_poisson(p), "non-coercive problem: no Dirichlet node inside the mask", SolverError);
  try {
    solve_poisson(s.problem, 1e-12, 1);
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("pockets without Dirichlet data are dropped with a warning") {
  const Grid g = square(1.0, 21);
  const Mask m = build_mask_from_predicate(g, [](const Point& p) { return std::abs(p[0]) > 0.3; });
  std::vector<std::string> warnings;
  set_log_sink([&](LogLevel l, const std::string& msg) {
    if (l == LogLevel::warning) warnings.push_back(msg);
  });
  const Mask left = build_mask_from_predicate(g, [](const Point& p) { return p[0] < -0.3; });
  const PoissonSolution sol = solve_poisson({m, {g.node({0, 10, 0})}, 1.0});
  set_log_sink(nullptr);
  CHECK(sol.dropped == m.count() - left.count());
  for (NodeId n = 0; n < g.size(); ++n) CHECK(sol.u.has(n) == left.contains(n));
}

TEST_CASE("growth slices: frozen domain and nondecreasing energy") {
  const Grid g = square(1.0, 41);
  DomainSpec d;
  d.omega = everything(g);
  d.v0 = ball(g, Point::Zero(), 0.3);
  d.x0 = g.nearest_node(Point::Zero());
  d.gamma = boundary_nodes(d.v0);

  ScalarField frozen(g);
  for (NodeId n : d.v0.members()) frozen[n] = 0.0;
  const GrowthSolution f = solve_on_growth(frozen, d, 1.0, 4, 1e-12);
  for (std::size_t m = 1; m < f.u.slices.size(); ++m)
    CHECK(sup_difference(f.u.slices[m], f.u.slices[0]) <= 1e-12);

  ScalarField v(g);
  for (NodeId n = 0; n < g.size(); ++n) v[n] = std::max(0.0, g.position(n).norm() - 0.3);
  const GrowthSolution gr = solve_on_growth(v, d, 0.6, 6, 1e-12);
  REQUIRE(gr.reports.size() == 7);
  for (std::size_t m = 1; m < gr.reports.size(); ++m) {
    CHECK(gr.reports[m].energy >= gr.reports[m - 1].energy - 1e-12);
    CHECK(gr.u.slices[m - 1].support().subset_of(gr.u.slices[m].support()));
    CHECK(std::isfinite(gr.reports[m].poincare));
  }

  const GrowthSolution par = solve_on_growth(v, d, 0.6, 6, 1e-12, 3);
  for (std::size_t m = 0; m < par.u.slices.size(); ++m)
    CHECK(sup_difference(par.u.slices[m], gr.u.slices[m]) <= 1e-9);
}

TEST_CASE("Poincare ratio stays bounded over a family of disk sectors") {
  const Grid g = square(1.0, 61);
  double worst = 0.0;
  for (double opening : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
    const Mask m = build_mask_from_predicate(g, [=](const Point& p) {
      const double a = std::atan2(p[1], p[0]) + M_PI;
      return p.norm() < 0.95 && a <= opening;
    });
    std::vector<NodeId> dir;
    for (NodeId n : m.members())
      if (g.position(n).norm() < 0.1) dir.push_back(n);
    const PoissonSolution sol = solve_poisson({m, dir, 1.0}, 1e-10);
    worst = std::max(worst, poincare_ratio(sol.u, g.spacing()));
  }
  CHECK(worst < 2.0);
}

}  // TEST_SUITE

#ifndef ACCRETA_TESTS_SUPPORT_HPP
#define ACCRETA_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "accreta/coupling.hpp"

namespace accreta::testing {

inline Mask everything(const Grid& g) {
  return build_mask_from_predicate(g, [](const Point&) { return true; });
}

inline Mask ball(const Grid& g, const Point& c, double r) {
  return build_mask_from_predicate(g, [=](const Point& p) { return (p - c).norm() <= r; });
}

inline SupportEvaluator unit_eikonal(int dim = 2) {
  return SupportEvaluator(make_eikonal(UProfile::constant(1.0), 1.0, 1.0), dim);
}

/// Whole window, V0 = closed ball of radius r0 at the origin, no Dirichlet set.
inline DomainSpec free_space(const Grid& g, double r0 = 1.0) {
  DomainSpec d;
  d.omega = everything(g);
  d.v0 = ball(g, Point::Zero(), r0);
  d.x0 = g.nearest_node(Point::Zero());
  return d;
}

/// Square window [-a, a]^2 with n nodes per side.
inline Grid square(double a, int n) {
  return Grid(2, Point(-a, -a, 0.0), 2.0 * a / (n - 1), {n, n, 1});
}

/**
 * One-row strip whose nodes sit at x_i = i h, h = 1 / (N + 1/2): the cell
 * face of the last node lies at x = 1, where the natural condition holds.
 * Row j = 1 of a 3-row grid; Dirichlet at x = 0.
 */
struct Strip {
  Grid grid;
  PoissonProblem problem;
  double h;
};

inline Strip strip(int N) {
  const double h = 1.0 / (N + 0.5);
  Grid g(2, Point(0.0, -h, 0.0), h, {N + 1, 3, 1});
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.size()), 0);
  for (int i = 0; i <= N; ++i) bits[static_cast<std::size_t>(g.node({i, 1, 0}))] = 1;
  PoissonProblem p{Mask(g, std::move(bits)), {g.node({0, 1, 0})}, 1.0};
  return {g, p, h};
}

inline int gcd3(int a, int b, int c) { return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)); }

/// Random connected blob domain with a random seed set, on an n x m grid.
struct RandomInstance {
  DomainSpec domain;
  Eigen::VectorXd activation;
};

inline RandomInstance random_instance(std::mt19937& rng, int n, int m) {
  Grid g(2, Point(0.0, 0.0, 0.0), 1.0 / (n - 1), {n, m, 1});
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // Omega: window minus a few random disks, restricted to the component of the seed.
  std::vector<std::pair<Point, double>> holes;
  for (int k = 0; k < 4; ++k) holes.push_back({Point(U(rng), U(rng) * (m - 1) / (n - 1), 0.0), 0.05 + 0.12 * U(rng)});
  const Point seed_c(0.1 + 0.2 * U(rng), 0.1 + 0.2 * U(rng) * (m - 1) / (n - 1), 0.0);
  const double seed_r = 0.04 + 0.06 * U(rng);
  auto in_holes = [&](const Point& p) {
    for (const auto& [c, r] : holes)
      if ((p - c).norm() < r && (seed_c - c).norm() > r + seed_r + 0.05) return true;
    return false;
  };
  Mask raw = build_mask_from_predicate(g, [&](const Point& p) { return !in_holes(p); });
  Mask v0 = build_mask_from_predicate(g, [&](const Point& p) { return (p - seed_c).norm() <= seed_r; }) & raw;
  if (v0.empty()) v0 = Mask(g, [&] {
                          std::vector<std::uint8_t> b(static_cast<std::size_t>(g.size()), 0);
                          b[static_cast<std::size_t>(g.nearest_node(seed_c))] = 1;
                          return b;
                        }());
  RandomInstance out;
  out.domain.omega = component_containing(raw | v0, v0.members());
  out.domain.v0 = v0;
  out.domain.x0 = v0.members().front();
  out.activation = Eigen::VectorXd(g.size());
  for (NodeId k = 0; k < g.size(); ++k) out.activation[k] = U(rng);
  return out;
}

// Dense system of the same discretisation, built from the definition.
inline Eigen::VectorXd dense_oracle(const PoissonProblem& p) {
  const Grid& g = p.mask.grid();
  const Mask region = component_containing(p.mask, p.dirichlet);
  std::vector<NodeId> unknowns;
  std::vector<int> slot(static_cast<std::size_t>(g.size()), -1);
  for (NodeId n : region.members())
    if (std::find(p.dirichlet.begin(), p.dirichlet.end(), n) == p.dirichlet.end()) {
      slot[static_cast<std::size_t>(n)] = static_cast<int>(unknowns.size());
      unknowns.push_back(n);
    }
  const int N = static_cast<int>(unknowns.size());
  const double h = g.spacing();
  const double c = std::pow(h, g.dim() - 2);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(N, p.rhs * std::pow(h, g.dim()));
  for (int i = 0; i < N; ++i)
    g.for_each_axis_neighbor(unknowns[static_cast<std::size_t>(i)], [&](NodeId m) {
      if (!region.contains(m)) return;
      A(i, i) += c;
      const int j = slot[static_cast<std::size_t>(m)];
      if (j >= 0) A(i, j) -= c;
    });
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (int i = 0; i < N; ++i) out[unknowns[static_cast<std::size_t>(i)]] = x[i];
  return out;
}

/// Nodes nearest to a densely sampled polyline.
inline std::vector<NodeId> rasterize(const Grid& g, const std::vector<Point>& poly) {
  std::vector<NodeId> out;
  for (std::size_t k = 1; k < poly.size(); ++k) {
    const double len = (poly[k] - poly[k - 1]).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(4.0 * len / g.spacing())));
    for (int s = 0; s <= pieces; ++s) out.push_back(g.nearest_node(poly[k - 1] + (poly[k] - poly[k - 1]) * (double(s) / pieces)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Koch prefractal over the unit segment after `levels` refinements.
inline std::vector<Point> koch(int levels) {
  std::vector<Point> pts{Point(0.0, 0.0, 0.0), Point(1.0, 0.0, 0.0)};
  const double c = std::cos(std::numbers::pi / 3.0), s = std::sin(std::numbers::pi / 3.0);
  for (int l = 0; l < levels; ++l) {
    std::vector<Point> next{pts.front()};
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const Point a = pts[k - 1], d = (pts[k] - a) / 3.0;
      const Point peak = a + d + Point(c * d[0] - s * d[1], s * d[0] + c * d[1], 0.0);
      next.insert(next.end(), {a + d, peak, a + 2.0 * d, pts[k]});
    }
    pts = std::move(next);
  }
  return pts;
}

}  // namespace accreta::testing

#endif  // ACCRETA_TESTS_SUPPORT_HPP

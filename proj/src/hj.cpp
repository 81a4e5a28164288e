#include "accreta/hj.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

#include <Eigen/Dense>

namespace accreta {

namespace {

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

std::vector<StencilOffset> make_stencil(int dim, int radius) {
  if (radius < 1 || radius > 3) throw ValidationError("stencil radius must be 1, 2 or 3");
  std::vector<StencilOffset> out;
  const int zr = dim == 3 ? radius : 0;
  for (int k = -zr; k <= zr; ++k) {
    for (int j = -radius; j <= radius; ++j) {
      for (int i = -radius; i <= radius; ++i) {
        if (i == 0 && j == 0 && k == 0) continue;
        if (std::gcd(std::gcd(std::abs(i), std::abs(j)), std::abs(k)) != 1) continue;
        StencilOffset s;
        s.offset = {i, j, k};
        const Point o(i, j, k);
        s.length = o.norm();
        s.direction = o / s.length;
        // Cell corners around the midpoint: both neighbors along odd components.
        std::vector<Index3> cell{{0, 0, 0}};
        for (int a = 0; a < 3; ++a) {
          const int c = s.offset[a];
          const int lo = floor_div2(c);
          std::vector<Index3> next;
          for (const Index3& base : cell) {
            Index3 p = base;
            p[a] = lo;
            next.push_back(p);
            if (c % 2 != 0) {
              p[a] = lo + 1;
              next.push_back(p);
            }
          }
          cell = std::move(next);
        }
        s.midpoint_cell = std::move(cell);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

double stencil_length_excess(int dim, int radius) {
  // The gauge of the hull of the stencil unit vectors is the support function
  // of the polar polytope {y : y.e <= 1}; its largest vertex norm minus one is
  // the worst relative excess of lattice path length over Euclidean length.
  const auto stencil = make_stencil(dim, radius);
  std::vector<Eigen::VectorXd> e;
  for (const auto& s : stencil) e.push_back(s.direction.head(dim));
  double best = 1.0;
  const std::size_t n = e.size();
  auto feasible = [&](const Eigen::VectorXd& y) {
    for (const auto& ek : e)
      if (ek.dot(y) > 1.0 + 1e-12) return false;
    return true;
  };
  if (dim == 2) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        Eigen::Matrix2d m;
        m.row(0) = e[a].transpose();
        m.row(1) = e[b].transpose();
        if (std::abs(m.determinant()) < 1e-12) continue;
        const Eigen::VectorXd y = m.partialPivLu().solve(Eigen::Vector2d::Ones());
        if (feasible(y)) best = std::max(best, y.norm());
      }
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c) {
          Eigen::Matrix3d m;
          m.row(0) = e[a].transpose();
          m.row(1) = e[b].transpose();
          m.row(2) = e[c].transpose();
          if (std::abs(m.determinant()) < 1e-12) continue;
          const Eigen::VectorXd y = m.partialPivLu().solve(Eigen::Vector3d::Ones());
          if (feasible(y)) best = std::max(best, y.norm());
        }
  }
  return best - 1.0;
}

MetricField::MetricField(const Grid& grid, SupportEvaluator support, Eigen::VectorXd activation)
    : grid_(grid), support_(std::move(support)), activation_(std::move(activation)) {
  if (activation_.size() != grid_.size()) throw Error("activation size does not match grid");
}

MetricField::MetricField(const Grid& grid, SupportEvaluator support)
    : MetricField(grid, std::move(support), Eigen::VectorXd::Zero(grid.size())) {}

double MetricField::midpoint_activation(const Index3& from, const StencilOffset& off) const {
  double sum = 0.0;
  for (const Index3& c : off.midpoint_cell)
    sum += activation_[grid_.node({from[0] + c[0], from[1] + c[1], from[2] + c[2]})];
  return sum / static_cast<double>(off.midpoint_cell.size());
}

double MetricField::edge_cost(const Index3& from, const StencilOffset& off) const {
  const double h = grid_.spacing();
  const Point mid = grid_.position(from) + 0.5 * h * Point(off.offset[0], off.offset[1], off.offset[2]);
  return h * off.length * support_(mid, midpoint_activation(from, off), off.direction);
}

bool edge_admissible(const Mask& omega, const Index3& from, const StencilOffset& off) {
  const Index3 to{from[0] + off.offset[0], from[1] + off.offset[1], from[2] + off.offset[2]};
  if (!omega.contains(from) || !omega.contains(to)) return false;
  for (const Index3& c : off.midpoint_cell)
    if (!omega.contains(Index3{from[0] + c[0], from[1] + c[1], from[2] + c[2]})) return false;
  return true;
}

AttachmentField solve_attachment(const DomainSpec& domain, const MetricField& metric, int stencil_radius) {
  const Grid& g = domain.grid();
  if (metric.grid() != g) throw Error("metric and domain live on different grids");
  const auto stencil = make_stencil(g.dim(), stencil_radius);
  const auto n = static_cast<std::size_t>(g.size());
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> dist(n, inf);
  std::vector<NodeId> pred(n, -1);
  std::vector<std::uint8_t> settled(n, 0);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  bool any_source = false;
  for (NodeId s = 0; s < g.size(); ++s) {
    if (domain.v0.contains(s) && domain.omega.contains(s)) {
      dist[static_cast<std::size_t>(s)] = 0.0;
      heap.emplace(0.0, s);
      any_source = true;
    }
  }
  if (!any_source) throw SolverError("empty source");

  while (!heap.empty()) {
    const auto [d, a] = heap.top();
    heap.pop();
    const auto ai = static_cast<std::size_t>(a);
    if (settled[ai]) continue;
    settled[ai] = 1;
    const Index3 from = g.index(a);
    for (const StencilOffset& off : stencil) {
      const Index3 to{from[0] + off.offset[0], from[1] + off.offset[1], from[2] + off.offset[2]};
      if (!g.contains(to)) continue;
      const NodeId b = g.node(to);
      const auto bi = static_cast<std::size_t>(b);
      if (settled[bi] || !edge_admissible(domain.omega, from, off)) continue;
      const double w = metric.edge_cost(from, off);
      if (!std::isfinite(w) || w < 0.0) throw SolverError("non-finite edge cost");
      const double nd = d + w;
      if (nd < dist[bi]) {
        dist[bi] = nd;
        pred[bi] = a;
        heap.emplace(nd, b);
      }
    }
  }

  AttachmentField out{ScalarField(g), std::move(pred), stencil_radius};
  for (std::size_t i = 0; i < n; ++i)
    if (std::isfinite(dist[i])) out.v[static_cast<NodeId>(i)] = dist[i];
  return out;
}

Curve backtrack_curve(const AttachmentField& a, NodeId x) {
  const Grid& g = a.grid();
  if (x < 0 || x >= g.size() || !a.v.has(x)) throw SolverError("backtrack from a node without a finite label");
  Curve c;
  NodeId cur = x;
  for (NodeId steps = 0;; ++steps) {
    if (steps > g.size()) throw SolverError("predecessor chain has a cycle");
    c.nodes.push_back(cur);
    c.vertices.push_back(g.position(cur));
    if (c.vertices.size() > 1) c.length += (c.vertices[c.vertices.size() - 1] - c.vertices[c.vertices.size() - 2]).norm();
    const NodeId p = a.predecessor[static_cast<std::size_t>(cur)];
    if (p < 0) {
      if (a.v[cur] != 0.0) throw SolverError("predecessor chain broken before reaching the seed set");
      break;
    }
    cur = p;
  }
  return c;
}

namespace {

// Vertices of the polar polytope {y : y.e <= 1} with their active constraint sets.
struct PolarVertex {
  Eigen::VectorXd y;
  std::vector<std::size_t> active;
};

std::vector<PolarVertex> polar_vertices(int dim, int radius) {
  const auto stencil = make_stencil(dim, radius);
  std::vector<Eigen::VectorXd> e;
  for (const auto& s : stencil) e.push_back(s.direction.head(dim));
  const std::size_t n = e.size();
  std::vector<PolarVertex> out;
  auto consider = [&](const Eigen::MatrixXd& m) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd y = lu.solve(Eigen::VectorXd::Ones(dim));
    PolarVertex pv{y, {}};
    for (std::size_t k = 0; k < n; ++k) {
      const double d = e[k].dot(y);
      if (d > 1.0 + 1e-10) return;
      if (d > 1.0 - 1e-10) pv.active.push_back(k);
    }
    for (const auto& q : out)
      if ((q.y - y).norm() < 1e-9) return;
    out.push_back(std::move(pv));
  };
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      m.row(0) = e[a].transpose();
      m.row(1) = e[b].transpose();
      if (dim == 2) {
        consider(m);
        continue;
      }
      for (std::size_t c = b + 1; c < n; ++c) {
        m.row(2) = e[c].transpose();
        consider(m);
      }
    }
  return out;
}

}  // namespace

double gradient_mixing_constant(int dim, int radius) {
  // Where v follows two adjacent facets of the lattice norm, centered
  // differences can combine components of both facet gradients.
  const auto verts = polar_vertices(dim, radius);
  double best = 1.0;
  for (std::size_t a = 0; a < verts.size(); ++a) {
    best = std::max(best, verts[a].y.norm());
    for (std::size_t b = a + 1; b < verts.size(); ++b) {
      std::size_t shared = 0;
      for (std::size_t k : verts[a].active)
        shared += static_cast<std::size_t>(std::count(verts[b].active.begin(), verts[b].active.end(), k));
      if (static_cast<int>(shared) < dim - 1) continue;
      best = std::max(best, verts[a].y.cwiseAbs().cwiseMax(verts[b].y.cwiseAbs()).norm());
    }
  }
  return best;
}

double gradient_slack(double sigma_upper, double L, double h, int dim, int stencil_radius) {
  (void)h;
  return sigma_upper * L * (gradient_mixing_constant(dim, stencil_radius) - 1.0);
}

GradientReport discrete_gradient_bound(const AttachmentField& a, double L, double sigma_upper) {
  const Grid& g = a.grid();
  const double h = g.spacing();
  GradientReport r;
  r.bound = sigma_upper * L;
  r.slack = gradient_slack(sigma_upper, L, h, g.dim(), a.stencil_radius);
  NodeId exceeding = 0;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (!a.v.has(n)) continue;
    const Index3 idx = g.index(n);
    double sq = 0.0;
    bool interior = true;
    for (int ax = 0; ax < g.dim() && interior; ++ax) {
      Index3 lo = idx, hi = idx;
      lo[ax] -= 1;
      hi[ax] += 1;
      if (!g.contains(lo) || !g.contains(hi) || !a.v.has(g.node(lo)) || !a.v.has(g.node(hi))) {
        interior = false;
        break;
      }
      const double d = (a.v[g.node(hi)] - a.v[g.node(lo)]) / (2.0 * h);
      sq += d * d;
    }
    if (!interior) continue;
    ++r.nodes_checked;
    const double grad = std::sqrt(sq);
    r.max_gradient = std::max(r.max_gradient, grad);
    if (grad > r.bound + r.slack) ++exceeding;
  }
  r.fraction_exceeding = r.nodes_checked ? static_cast<double>(exceeding) / static_cast<double>(r.nodes_checked) : 0.0;
  r.pass = exceeding == 0;
  return r;
}

double sup_difference(const ScalarField& a, const ScalarField& b, double R) {
  const Grid& g = a.grid();
  if (b.grid() != g) throw Error("fields live on different grids");
  double worst = 0.0;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (g.position(n).norm() > R) continue;
    const bool ha = a.has(n), hb = b.has(n);
    if (ha != hb) return std::numeric_limits<double>::infinity();
    if (ha) worst = std::max(worst, std::abs(a[n] - b[n]));
  }
  return worst;
}

double representation_residual(const DomainSpec& domain, const MetricField& metric, const AttachmentField& a,
                               double R) {
  const AttachmentField again = solve_attachment(domain, metric, a.stencil_radius);
  return sup_difference(a.v, again.v, R);
}

}  // namespace accreta

#include "accreta/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace accreta {

namespace {

constexpr double kFar = 1e30;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) on one line, in place.
void edt_line(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    for (;;) {
      const int p = v[k];
      s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      if (s <= z[k]) {
        // k == 0: the new parabola dominates everywhere.
        v[0] = q;
        z[0] = -std::numeric_limits<double>::infinity();
        z[1] = std::numeric_limits<double>::infinity();
        s = std::numeric_limits<double>::quiet_NaN();
      }
      break;
    }
    if (std::isnan(s)) continue;
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

std::vector<NodeId> supported_nodes(const ScalarField& v) {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < v.grid().size(); ++n)
    if (v.has(n)) out.push_back(n);
  return out;
}

}  // namespace

std::vector<double> squared_distance_transform(const Mask& target) {
  const Grid& g = target.grid();
  const auto total = static_cast<std::size_t>(g.size());
  if (target.empty()) return std::vector<double>(total, std::numeric_limits<double>::infinity());
  std::vector<double> grid_vals(total);
  for (std::size_t i = 0; i < total; ++i) grid_vals[i] = target.bits()[i] ? 0.0 : kFar;
  const Index3 shape = g.shape();
  for (int axis = 0; axis < g.dim(); ++axis) {
    const int len = shape[axis];
    std::vector<double> f(static_cast<std::size_t>(len)), d(static_cast<std::size_t>(len));
    std::vector<int> v(static_cast<std::size_t>(len));
    std::vector<double> z(static_cast<std::size_t>(len) + 1);
    Index3 lim = shape;
    lim[axis] = 1;
    for (int k = 0; k < lim[2]; ++k)
      for (int j = 0; j < lim[1]; ++j)
        for (int i = 0; i < lim[0]; ++i) {
          Index3 idx{i, j, k};
          for (int q = 0; q < len; ++q) {
            idx[axis] = q;
            f[static_cast<std::size_t>(q)] = grid_vals[static_cast<std::size_t>(g.node(idx))];
          }
          edt_line(f, d, v, z);
          for (int q = 0; q < len; ++q) {
            idx[axis] = q;
            grid_vals[static_cast<std::size_t>(g.node(idx))] = std::min(d[static_cast<std::size_t>(q)], kFar);
          }
        }
  }
  return grid_vals;
}

std::vector<double> distance_to_complement(const Mask& m) {
  const Grid& g = m.grid();
  std::vector<std::uint8_t> inv(m.bits().size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = m.bits()[i] ? 0 : 1;
  const std::vector<double> sq = squared_distance_transform(Mask(g, std::move(inv)));
  std::vector<double> out(sq.size());
  for (NodeId n = 0; n < g.size(); ++n) {
    const Index3 idx = g.index(n);
    double frame = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dim(); ++a)
      frame = std::min({frame, static_cast<double>(idx[a] + 1), static_cast<double>(g.shape()[a] - idx[a])});
    out[static_cast<std::size_t>(n)] = g.spacing() * std::sqrt(std::min(sq[static_cast<std::size_t>(n)], frame * frame));
  }
  return out;
}

double hausdorff(const Mask& a, const Mask& b) {
  if (a.empty() || b.empty()) throw Error("Hausdorff distance of an empty set");
  if (a.grid() != b.grid()) throw Error("masks live on different grids");
  const auto da = squared_distance_transform(a);
  const auto db = squared_distance_transform(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (a.bits()[i]) worst = std::max(worst, db[i]);
    if (b.bits()[i]) worst = std::max(worst, da[i]);
  }
  return a.grid().spacing() * std::sqrt(worst);
}

Check make_check(std::string name, double measured, double bound, double slack, bool lower_bound) {
  Check c{std::move(name), measured, bound, slack, lower_bound, true};
  c.pass = lower_bound ? measured >= bound - slack : measured <= bound + slack;
  return c;
}

TimeLipschitzReport check_time_lipschitz(const AttachmentField& a, const std::vector<double>& times,
                                         double sigma_lower) {
  const Grid& g = a.grid();
  const double h = g.spacing();
  TimeLipschitzReport r;
  std::vector<Mask> sets;
  std::vector<std::vector<double>> edts;
  for (double t : times) {
    sets.push_back(sublevel(a.v, t));
    edts.push_back(squared_distance_transform(sets.back()));
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      TimePair p;
      p.s = times[i];
      p.t = times[j];
      if (sets[i].empty() || sets[j].empty()) continue;
      double worst = 0.0;
      for (std::size_t n = 0; n < edts[i].size(); ++n) {
        if (sets[j].bits()[n]) worst = std::max(worst, edts[i][n]);
        if (sets[i].bits()[n]) worst = std::max(worst, edts[j][n]);
      }
      p.hausdorff = h * std::sqrt(worst);
      p.bound = (p.t - p.s) / sigma_lower;
      p.slack = 2.0 * h;
      p.pass = p.hausdorff <= p.bound + p.slack;
      p.measure_difference = static_cast<double>((sets[j] - sets[i]).count()) * g.cell_volume();
      r.pass = r.pass && p.pass;
      if (p.measure_difference > 0.0 && p.t > p.s) {
        xs.push_back(std::log(p.t - p.s));
        ys.push_back(std::log(p.measure_difference));
      }
      r.pairs.push_back(p);
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    r.holder_mu = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
    r.holder_c = std::exp(my - r.holder_mu * mx);
  } else {
    r.holder_mu = r.holder_c = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

namespace {

// Lower bound on the distance from an arbitrary point to the complement nodes:
// the best triangle-inequality bound over the nodes of the cell holding p.
double point_clearance(const Grid& g, const std::vector<double>& clearance, const Point& p) {
  const NodeId n = g.nearest_node(p);
  double best = clearance[static_cast<std::size_t>(n)] - (p - g.position(n)).norm();
  const Eigen::Vector3d c = g.lattice_coords(p);
  Index3 lo{0, 0, 0};
  for (int ax = 0; ax < g.dim(); ++ax) lo[ax] = static_cast<int>(std::floor(c[ax]));
  for (int corner = 0; corner < (1 << g.dim()); ++corner) {
    Index3 q = lo;
    for (int ax = 0; ax < g.dim(); ++ax) q[ax] += (corner >> ax) & 1;
    if (!g.contains(q)) continue;
    const NodeId m = g.node(q);
    best = std::max(best, clearance[static_cast<std::size_t>(m)] - (p - g.position(m)).norm());
  }
  return best;
}

// Appends the segment a->b to `pts`, subdivided to pieces no longer than `step`.
void append_segment(std::vector<Point>& pts, const Point& a, const Point& b, double step) {
  const double len = (b - a).norm();
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int k = 1; k <= pieces; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
}

bool segment_inside(const Mask& m, const Point& a, const Point& b, double step) {
  const Grid& g = m.grid();
  const double len = (b - a).norm();
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int k = 0; k <= pieces; ++k) {
    const Point p = a + (b - a) * (static_cast<double>(k) / pieces);
    // Every node of the cell holding p must be a member.
    const Eigen::Vector3d c = g.lattice_coords(p);
    Index3 lo{0, 0, 0};
    for (int ax = 0; ax < g.dim(); ++ax) lo[ax] = static_cast<int>(std::floor(c[ax] + 1e-9));
    for (int corner = 0; corner < (1 << g.dim()); ++corner) {
      Index3 q = lo;
      for (int ax = 0; ax < g.dim(); ++ax) {
        const bool exact = std::abs(c[ax] - std::round(c[ax])) < 1e-9;
        if ((corner >> ax) & 1) {
          if (exact) q[ax] = static_cast<int>(std::lround(c[ax]));
          else q[ax] = lo[ax] + 1;
        }
      }
      if (!m.contains(q)) return false;
    }
  }
  return true;
}

}  // namespace

JohnEstimate john_constant_estimate(const Mask& mask, NodeId x0, const AttachmentField& a, const Mask& seed,
                                    int samples) {
  const Grid& g = mask.grid();
  const double h = g.spacing();
  if (x0 < 0 || x0 >= g.size() || !mask.contains(x0)) throw SolverError("John center is not inside the set");
  if (!seed.contains(x0) || !seed.connected()) throw SolverError("seed set must be connected and contain x0");
  for (NodeId n = 0; n < g.size(); ++n)
    if (mask.contains(n) && !a.v.has(n))
      throw SolverError("set has a component without a finite attachment time (disconnected from x0)");

  const std::vector<double> clearance = distance_to_complement(mask);

  // Curves inside the seed set: straight to x0 when possible, otherwise a lattice geodesic.
  DomainSpec seed_domain;
  seed_domain.omega = seed;
  std::vector<std::uint8_t> center(static_cast<std::size_t>(g.size()), 0);
  center[static_cast<std::size_t>(x0)] = 1;
  seed_domain.v0 = Mask(g, std::move(center));
  seed_domain.x0 = x0;
  const MetricField unit(g, SupportEvaluator(make_eikonal(UProfile::constant(1.0), 1.0, 1.0), g.dim()));
  const AttachmentField seed_tree = solve_attachment(seed_domain, unit, 2);

  // Stratify boundary nodes by direction seen from x0; keep the farthest node per bin.
  const Point c0 = g.position(x0);
  const auto dirs = unit_directions(g.dim(), samples);
  std::vector<NodeId> pick(dirs.size(), -1);
  std::vector<double> pick_r(dirs.size(), -1.0);
  for (NodeId n : boundary_nodes(mask)) {
    const Point d = g.position(n) - c0;
    const double r = d.norm();
    if (r == 0.0) continue;
    std::size_t best = 0;
    double best_dot = -2.0;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const double dot = dirs[k].dot(d) / r;
      if (dot > best_dot) {
        best_dot = dot;
        best = k;
      }
    }
    if (r > pick_r[best]) {
      pick_r[best] = r;
      pick[best] = n;
    }
  }

  JohnEstimate est;
  for (NodeId x : pick) {
    if (x < 0) continue;
    ++est.samples_used;
    const Curve to_seed = backtrack_curve(a, x);
    std::vector<Point> pts{to_seed.vertices.front()};
    for (std::size_t k = 1; k < to_seed.vertices.size(); ++k)
      append_segment(pts, to_seed.vertices[k - 1], to_seed.vertices[k], 0.5 * h);
    const Point y = to_seed.vertices.back();
    if (segment_inside(seed, y, c0, 0.25 * h)) {
      append_segment(pts, y, c0, 0.5 * h);
    } else {
      const Curve inside = backtrack_curve(seed_tree, to_seed.nodes.back());
      for (std::size_t k = 1; k < inside.vertices.size(); ++k)
        append_segment(pts, inside.vertices[k - 1], inside.vertices[k], 0.5 * h);
    }
    std::vector<double> arc(pts.size(), 0.0);
    double ratio = 1.0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      arc[k] = arc[k - 1] + (pts[k] - pts[k - 1]).norm();
      if (arc[k] <= 0.0) continue;
      ratio = std::min(ratio, point_clearance(g, clearance, pts[k]) / arc[k]);
    }
    if (ratio < est.estimate || est.worst_sample < 0) {
      est.estimate = std::min(est.estimate, ratio);
      est.worst_sample = x;
      est.curve = std::move(pts);
      est.arc_length = std::move(arc);
    }
  }
  return est;
}

bool verify_john_curve(const Mask& mask, const JohnEstimate& est) {
  const Grid& g = mask.grid();
  const std::vector<double> clearance = distance_to_complement(mask);
  for (std::size_t k = 0; k < est.curve.size(); ++k) {
    if (est.arc_length[k] <= 0.0) continue;
    if (point_clearance(g, clearance, est.curve[k]) < est.estimate * est.arc_length[k] - 1e-12) return false;
  }
  return true;
}

BoxCount box_counting_slope(const Grid& grid, const std::vector<NodeId>& boundary, const std::vector<double>& scales) {
  BoxCount out;
  const double h = grid.spacing();
  if (boundary.empty()) throw Error("box counting of an empty set");
  for (double r : scales) {
    if (!(r >= 2.0 * h * (1.0 - 1e-12))) continue;
    std::vector<std::array<long long, 3>> keys;
    keys.reserve(boundary.size());
    for (NodeId n : boundary) {
      const Point p = grid.position(n) - grid.origin();
      keys.push_back({static_cast<long long>(std::floor(p[0] / r + 1e-9)),
                      static_cast<long long>(std::floor(p[1] / r + 1e-9)),
                      static_cast<long long>(std::floor(p[2] / r + 1e-9))});
    }
    std::sort(keys.begin(), keys.end());
    const auto unique = std::unique(keys.begin(), keys.end()) - keys.begin();
    out.scales.push_back(r);
    out.counts.push_back(static_cast<double>(unique));
  }
  if (out.scales.size() < 3) throw Error("degenerate box-counting fit: fewer than 3 usable scales");
  const double n = static_cast<double>(out.scales.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < out.scales.size(); ++i) {
    mx += std::log(1.0 / out.scales[i]);
    my += std::log(out.counts[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < out.scales.size(); ++i) {
    const double x = std::log(1.0 / out.scales[i]) - mx;
    sxy += x * (std::log(out.counts[i]) - my);
    sxx += x * x;
  }
  if (sxx <= 0.0) throw Error("degenerate box-counting fit: repeated scales");
  out.slope = sxy / sxx;
  return out;
}

std::vector<double> dyadic_scales(const Grid& grid, const std::vector<NodeId>& nodes, int min_count) {
  Point lo = Point::Constant(std::numeric_limits<double>::infinity());
  Point hi = -lo;
  for (NodeId n : nodes) {
    lo = lo.cwiseMin(grid.position(n));
    hi = hi.cwiseMax(grid.position(n));
  }
  const double extent = nodes.empty() ? 0.0 : (hi - lo).head(grid.dim()).maxCoeff();
  std::vector<double> scales;
  for (double r = 2.0 * grid.spacing(); r <= 0.5 * extent || static_cast<int>(scales.size()) < min_count; r *= 2.0) {
    if (r > extent && static_cast<int>(scales.size()) >= min_count) break;
    if (r > 4.0 * extent + 1.0) break;
    scales.push_back(r);
  }
  return scales;
}

double seed_inradius(const Mask& seed, NodeId x0) {
  return distance_to_complement(seed)[static_cast<std::size_t>(x0)];
}

TheoryConstants theory_constants(const DomainSpec& domain, double sigma_lower, double sigma_upper, double R) {
  TheoryConstants k;
  const double x0_norm = domain.grid().position(domain.x0).norm();
  k.inv_sigma_lower = 1.0 / sigma_lower;
  k.kappa_bar = sigma_lower / (2.0 * sigma_upper + sigma_lower) * domain.kappa0;
  k.R = R;
  k.c1 = sigma_upper * domain.L * (x0_norm + R);
  k.c3_offset = seed_inradius(domain.v0, domain.x0) / domain.kappa0 + x0_norm;
  return k;
}

bool RegularityReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

RegularityReport regularity_report(const DomainSpec& domain, const AttachmentField& a, double sigma_lower,
                                   double sigma_upper, const BoundCheckOptions& opt) {
  const Grid& g = a.grid();
  const double h = g.spacing();
  RegularityReport rep;
  double R = opt.R;
  if (!(R > 0.0)) {
    R = 0.0;
    for (NodeId n = 0; n < g.size(); ++n) R = std::max(R, g.position(n).norm());
  }
  rep.constants = theory_constants(domain, sigma_lower, sigma_upper, R);
  const double excess = stencil_length_excess(g.dim(), a.stencil_radius);

  // Optimal-curve lengths against v / sigma_*.
  const std::vector<NodeId> nodes = supported_nodes(a.v);
  {
    double worst = -std::numeric_limits<double>::infinity();
    const std::size_t count = std::min<std::size_t>(nodes.size(), static_cast<std::size_t>(opt.curve_samples));
    for (std::size_t k = 0; k < count; ++k) {
      const NodeId x = nodes[k * nodes.size() / count];
      const Curve c = backtrack_curve(a, x);
      worst = std::max(worst, c.length - a.v[x] / sigma_lower);
    }
    rep.checks.push_back(make_check("optimal-curve-length", worst, 0.0, 2.0 * h));
  }

  const GradientReport grad = discrete_gradient_bound(a, domain.L, sigma_upper);
  rep.checks.push_back(make_check("gradient-bound", grad.max_gradient, grad.bound, grad.slack));

  {
    double vmax = 0.0;
    for (NodeId n : nodes)
      if (g.position(n).norm() <= R) vmax = std::max(vmax, a.v[n]);
    rep.checks.push_back(make_check("window-bound", vmax, rep.constants.c1, excess * rep.constants.c1 + 2.0 * sigma_upper * h));
  }

  std::vector<double> times;
  for (int m = 1; m <= opt.M; ++m) times.push_back(opt.T * m / opt.M);
  rep.lipschitz = check_time_lipschitz(a, times, sigma_lower);
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (const TimePair& p : rep.lipschitz.pairs) worst = std::max(worst, p.hausdorff - p.bound);
    if (rep.lipschitz.pairs.empty()) worst = 0.0;
    rep.checks.push_back(make_check("hausdorff-lipschitz", worst, 0.0, 2.0 * h));
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : times) {
      const Mask vt = sublevel(a.v, t);
      double rmax = 0.0;
      for (NodeId n : vt.members()) rmax = std::max(rmax, g.position(n).norm());
      worst = std::max(worst, rmax - c3(rep.constants, t));
    }
    rep.checks.push_back(make_check("window-containment", worst, 0.0, h));
  }

  // The unconstrained John bound applies while V(T) stays off the boundary of omega.
  bool unconstrained = true;
  {
    const Mask vT = sublevel(a.v, opt.T);
    for (NodeId n : boundary_nodes(domain.omega)) unconstrained = unconstrained && !vT.contains(n);
  }
  double john_min = 1.0;
  for (double t : times) {
    const Mask vt = sublevel(a.v, t);
    if (!vt.contains(domain.x0)) continue;
    const JohnEstimate je = john_constant_estimate(vt, domain.x0, a, domain.v0, opt.john_samples);
    rep.john_times.push_back(t);
    rep.john_estimates.push_back(je.estimate);
    john_min = std::min(john_min, je.estimate);
  }
  if (unconstrained && !rep.john_estimates.empty())
    rep.checks.push_back(make_check("john-lower-bound", john_min, rep.constants.kappa_bar, 0.05, true));

  rep.box_counting_time = opt.T;
  {
    const std::vector<NodeId> bd = boundary_nodes(sublevel(a.v, opt.T));
    try {
      rep.box_counting = box_counting_slope(g, bd, dyadic_scales(g, bd));
      rep.checks.push_back(make_check("box-counting-dimension", rep.box_counting.slope, g.dim(), 0.0));
    } catch (const Error&) {
      rep.box_counting.slope = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rep;
}

}  // namespace accreta

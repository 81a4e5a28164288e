// Acceptance suite: one pass/fail line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "accreta/config.hpp"
#include "accreta/log.hpp"
#include "support.hpp"

using namespace accreta;
using namespace accreta::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  RunConfig config;
  CouplingResult result;
  double seconds = 0.0;
};

const Run& fixture_run(const std::string& name) {
  static std::map<std::string, Run> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  Run r;
  r.config = load_config(fs::path(ACCRETA_FIXTURES) / name);
  const auto t0 = std::chrono::steady_clock::now();
  r.result = run(r.config.problem());
  r.seconds = seconds_since(t0);
  return cache.emplace(name, std::move(r)).first->second;
}

// Bound checks required on every converged run.
const char* const kBoundChecks[] = {"optimal-curve-length", "gradient-bound", "window-bound", "hausdorff-lipschitz",
                                    "window-containment"};

std::vector<Check> bound_suite(const Run& r) {
  const RegularityReport rep = regularity_report(r.config.domain, r.result.state.v, r.config.model.sigma_lower,
                                                 r.config.model.sigma_upper, r.config.diagnostics);
  std::vector<Check> out;
  for (const char* name : kBoundChecks)
    for (const Check& c : rep.checks)
      if (c.name == name) out.push_back(c);
  return out;
}

Outcome eikonal_exactness() {
  const Grid g = square(3.0, 201);
  const DomainSpec d = free_space(g, 1.0);
  Outcome o;
  double err2 = 0.0, err3 = 0.0, secs = 0.0;
  for (int radius : {2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    const AttachmentField a = solve_attachment(d, MetricField(g, unit_eikonal()), radius);
    const double s = seconds_since(t0);
    double err = 0.0;
    for (NodeId n = 0; n < g.size(); ++n)
      err = std::max(err, std::abs(a.v[n] - std::max(0.0, g.position(n).norm() - 1.0)));
    (radius == 2 ? err2 : err3) = err;
    if (radius == 2) secs = s;
  }
  o.pass = err2 <= 0.04 && secs < 5.0;
  o.detail = fmt("r=2 max error %.4f (bound 0.04), %.2f s (bound 5 s)", err2, secs);
  o.notes.push_back(fmt("r=3 max error %.4f; lattice length excess r=2 %.4f, r=3 %.4f", err3,
                        stencil_length_excess(2, 2), stencil_length_excess(2, 3)));
  return o;
}

// Bellman-Ford over an independently enumerated stencil and admissibility test.
std::vector<double> bellman_ford(const DomainSpec& d, const MetricField& metric, int radius) {
  const Grid& g = d.grid();
  std::map<std::pair<int, int>, StencilOffset> library;
  for (const StencilOffset& s : make_stencil(2, radius)) library[{s.offset[0], s.offset[1]}] = s;

  struct Edge {
    NodeId from, to;
    double cost;
  };
  std::vector<Edge> edges;
  for (NodeId n : d.omega.members()) {
    const Index3 i = g.index(n);
    for (int a = -radius; a <= radius; ++a)
      for (int b = -radius; b <= radius; ++b) {
        if ((a == 0 && b == 0) || gcd3(a, b, 0) != 1) continue;
        const Index3 j{i[0] + a, i[1] + b, 0};
        if (!d.omega.contains(j)) continue;
        // Midpoint cell: both neighbours along every axis where the midpoint is fractional.
        bool inside = true;
        for (int x : {(2 * i[0] + a) / 2, (2 * i[0] + a + 1) / 2})
          for (int y : {(2 * i[1] + b) / 2, (2 * i[1] + b + 1) / 2})
            inside = inside && d.omega.contains(Index3{x, y, 0});
        if (!inside) continue;
        edges.push_back({n, g.node(j), metric.edge_cost(i, library.at({a, b}))});
      }
  }
  std::vector<double> dist(static_cast<std::size_t>(g.size()), std::numeric_limits<double>::infinity());
  for (NodeId n : d.v0.members()) dist[static_cast<std::size_t>(n)] = 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Edge& e : edges) {
      const double c = dist[static_cast<std::size_t>(e.from)] + e.cost;
      if (c < dist[static_cast<std::size_t>(e.to)]) {
        dist[static_cast<std::size_t>(e.to)] = c;
        changed = true;
      }
    }
  }
  return dist;
}

Outcome oracle_equivalence() {
  std::mt19937 rng(2024);
  const SupportEvaluator support(make_eikonal(UProfile::affine(1.0, 0.5, 0.0, 1.0), 1.0 / 1.5, 1.0));
  int mismatched = 0;
  NodeId compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 20 + static_cast<int>(rng() % 31), m = 20 + static_cast<int>(rng() % 31);
    const int radius = 1 + trial % 3;
    const RandomInstance inst = random_instance(rng, n, m);
    const MetricField metric(inst.domain.grid(), support, inst.activation);
    const AttachmentField a = solve_attachment(inst.domain, metric, radius);
    const std::vector<double> oracle = bellman_ford(inst.domain, metric, radius);
    bool same = true;
    for (NodeId k = 0; k < inst.domain.grid().size(); ++k) {
      const double o = oracle[static_cast<std::size_t>(k)];
      same = same && (std::isinf(o) ? !a.v.has(k) : a.v.has(k) && a.v[k] == o);
    }
    compared += inst.domain.grid().size();
    if (!same) ++mismatched;
  }
  return {mismatched == 0, fmt("%d of 20 instances differ (%ld nodes compared, exact equality)", mismatched,
                               static_cast<long>(compared))};
}

Outcome bound_suite_on_runs() {
  Outcome o{true, ""};
  int failures = 0, checks = 0, runs = 0;
  for (const char* name : {"decoupled.json", "disk.json"}) {
    const Run& r = fixture_run(name);
    if (r.result.verdict != Verdict::converged) continue;
    ++runs;
    for (const Check& c : bound_suite(r)) {
      ++checks;
      if (!c.pass) ++failures;
      o.notes.push_back(fmt("%s %s: measured %.5g, bound %.5g + slack %.3g", name, c.name.c_str(), c.measured, c.bound,
                            c.slack));
    }
  }
  o.pass = failures == 0 && runs == 2 && checks == 10;
  o.detail = fmt("%d failures in %d checks over %d converged runs", failures, checks, runs);
  return o;
}

Outcome elliptic_accuracy() {
  const Strip s = strip(40);
  const PoissonSolution strip_sol = solve_poisson(s.problem, 1e-12);
  double strip_err = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double x = i * s.h;
    strip_err = std::max(strip_err, std::abs(strip_sol.u[s.grid.node({i, 1, 0})] - (x - 0.5 * x * x)));
  }

  const Grid g = square(1.1, 89);
  const Mask disk = ball(g, Point::Zero(), 1.0);
  const PoissonSolution disk_sol = solve_poisson({disk, boundary_nodes(disk), 1.0}, 1e-12);
  double disk_err = 0.0;
  for (NodeId n : disk.members()) {
    const double r = g.position(n).norm();
    disk_err = std::max(disk_err, std::abs(disk_sol.u[n] - 0.25 * (1.0 - r * r)));
  }

  std::mt19937 rng(17);
  double lu_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Grid small(2, Point::Zero(), 0.1, {10, 10, 1});
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(small.size()));
    for (auto& b : bits) b = (rng() % 10) < 7;
    bits[0] = 1;
    const Mask m = component_containing(Mask(small, bits), {0});
    const auto members = m.members();
    std::vector<NodeId> dir{members[rng() % members.size()], members[rng() % members.size()]};
    if (dir[0] == dir[1]) dir.pop_back();
    const PoissonProblem p{m, dir, 1.0};
    const PoissonSolution sol = solve_poisson(p, 1e-12);
    const Eigen::VectorXd oracle = dense_oracle(p);
    for (NodeId n : sol.u.support().members()) lu_err = std::max(lu_err, std::abs(sol.u[n] - oracle[n]));
  }

  const Run& r = fixture_run("disk.json");
  const double cg_tol = r.config.coupling.cg_tol;
  double worst = 0.0;
  for (const ScalarField& u : r.result.state.u.u.slices) {
    const double i = integral(u);
    if (i > 0.0) worst = std::max(worst, std::abs(dirichlet_energy(u) - i) / (10.0 * cg_tol * i));
  }

  Outcome o;
  o.pass = strip_err <= 2.0 * s.h * s.h && disk_err <= 3.0 * g.spacing() && lu_err <= 1e-8 && worst <= 1.0;
  o.detail = fmt("strip %.2e (<= %.2e), disk %.2e (<= %.2e), dense LU %.1e (<= 1e-8), energy identity at %.1e of its bound",
                 strip_err, 2.0 * s.h * s.h, disk_err, 3.0 * g.spacing(), lu_err, worst);
  return o;
}

Outcome poincare() {
  const Strip s = strip(80);
  const double ratio = poincare_ratio(solve_poisson(s.problem, 1e-12).u, s.h);
  const double rel = std::abs(ratio / std::sqrt(1.4) - 1.0);
  return {rel <= 0.02, fmt("ratio %.5f vs sqrt(1.4) = %.5f, relative error %.4f (<= 0.02)", ratio, std::sqrt(1.4), rel)};
}

Outcome convolution_oracle() {
  const Grid g = square(1.0, 41);
  const int M = 200;
  const KernelPair kp{TimeKernel::exponential(1.0), SpatialKernel::gaussian(0.05)};
  TimeField ones{g, {}, {}};
  for (int m = 0; m <= M; ++m) {
    ones.times.push_back(static_cast<double>(m) / M);
    ones.slices.push_back(ScalarField(g, Eigen::VectorXd::Ones(g.size())));
  }
  const ActivationTrace ku = convolve(ones, kp);
  double err = 0.0;
  for (NodeId n = 0; n < g.size(); ++n) {
    const Point p = g.position(n);
    if (std::max(std::abs(p[0]), std::abs(p[1])) > 1.0 - kp.phi.radius()) continue;
    for (std::size_t m = 0; m < ku.times.size(); ++m) err = std::max(err, std::abs(ku.values[m][n] - (1.0 - std::exp(-ku.times[m]))));
  }

  std::mt19937 rng(29);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Grid rg = square(1.0, 25);
    const KernelPair rk{TimeKernel::exponential(0.5 + trial), SpatialKernel::gaussian(0.05 + 0.02 * trial)};
    TimeField u{rg, {}, {}};
    for (int m = 0; m <= 10; ++m) {
      u.times.push_back(0.1 * m);
      ScalarField s(rg);
      for (NodeId n = 0; n < rg.size(); ++n)
        if (U(rng) < 0.7) s[n] = U(rng);
      u.slices.push_back(s);
    }
    const double bound = time_lipschitz_bound(rk, make_spatial_stencil(rk.phi, rg), max_slice_l2(u));
    worst = std::max(worst, measured_time_lipschitz(convolve(u, rk)) / bound);
  }
  return {err <= 1e-3 && worst <= 1.0,
          fmt("unit-field error %.2e (<= 1e-3), time-Lipschitz at %.3f of C_K over 10 random inputs", err, worst)};
}

Outcome decoupled_fixed_point() {
  const Run& r = fixture_run("decoupled.json");
  const auto& h = r.result.state.history;
  const bool ok = r.result.verdict == Verdict::converged && r.result.state.j == 1 && h.size() == 2 &&
                  h[1].delta == 0.0 && r.result.representation_residual == 0.0;
  return {ok, fmt("verdict %s at j=%d, delta %.3g, representation residual %.3g", to_string(r.result.verdict).c_str(),
                  r.result.state.j, h.back().delta, r.result.representation_residual)};
}

Outcome coupled_benchmark() {
  const Run& r = fixture_run("disk.json");
  bool bounds = true;
  for (const Check& c : bound_suite(r)) bounds = bounds && c.pass;
  const double tol = r.config.coupling.tol;
  const bool ok = r.result.verdict == Verdict::converged && r.result.state.j <= 50 && r.seconds < 120.0 && bounds &&
                  r.result.representation_residual <= tol;
  Outcome o{ok, fmt("verdict %s after %d sweeps in %.1f s (< 120 s), bound suite %s, representation residual %.2e (<= %g)",
                    to_string(r.result.verdict).c_str(), r.result.state.j, r.seconds, bounds ? "passes" : "fails",
                    r.result.representation_residual, tol)};
  for (const IterationRecord& rec : r.result.state.history)
    o.notes.push_back(fmt("j=%d delta %.3e, max v %.4f", rec.j, rec.delta, rec.v_max));
  return o;
}

Outcome john_lower_bound() {
  const Grid g = square(2.0, 161);
  DomainSpec d = free_space(g, 0.5);
  d.kappa0 = 1.0;
  const AttachmentField a = solve_attachment(d, MetricField(g, unit_eikonal()));
  BoundCheckOptions opt;
  opt.T = 1.0;
  opt.M = 10;
  const RegularityReport rep = regularity_report(d, a, 1.0, 1.0, opt);
  double lo = 1.0;
  for (double e : rep.john_estimates) lo = std::min(lo, e);
  const double target = rep.constants.kappa_bar - 0.05;
  return {!rep.john_estimates.empty() && lo >= target && std::abs(rep.constants.kappa_bar - 1.0 / 3.0) < 1e-12,
          fmt("min estimate %.4f over %zu times (>= %.4f)", lo, rep.john_estimates.size(), target)};
}

Outcome box_counting() {
  const Grid g = square(1.2, 1201);
  const auto circle = boundary_nodes(ball(g, Point::Zero(), 1.0));
  const double disk = box_counting_slope(g, circle, dyadic_scales(g, circle)).slope;

  const Grid kg(2, Point(-0.05, -0.05, 0.0), 1.0 / 2400.0, {2761, 841, 1});
  std::vector<double> scales;
  for (double r = 1.0 / 81.0; r <= 0.34; r *= 1.5) scales.push_back(r);
  const double kochs = box_counting_slope(kg, rasterize(kg, koch(4)), scales).slope;
  const double dim = std::log(4.0) / std::log(3.0);
  return {std::abs(disk - 1.0) <= 0.1 && std::abs(kochs - dim) <= 0.15,
          fmt("disk %.4f (1 +- 0.1), Koch level 4 %.4f (%.4f +- 0.15)", disk, kochs, dim)};
}

}  // namespace

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::string(argv[1]) == "-v";
  set_log_sink([](LogLevel, const std::string&) {});
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"eikonal exactness", eikonal_exactness},
      {"oracle equivalence", oracle_equivalence},
      {"bound suite on converged runs", bound_suite_on_runs},
      {"elliptic accuracy", elliptic_accuracy},
      {"Poincare ratio", poincare},
      {"convolution oracle", convolution_oracle},
      {"decoupled fixed point", decoupled_fixed_point},
      {"coupled benchmark", coupled_benchmark},
      {"John lower bound", john_lower_bound},
      {"box counting", box_counting},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    if (verbose || !o.pass)
      for (const std::string& n : o.notes) std::printf("        %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

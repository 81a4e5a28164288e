#include "accreta/coupling.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "accreta/log.hpp"

namespace accreta {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MetricField metric_for(const CouplingProblem& p, Eigen::VectorXd activation) {
  return MetricField(p.domain.grid(), p.support, std::move(activation));
}

GrowthSolution grow(const CouplingProblem& p, const AttachmentField& v) {
  const CouplingConfig& c = p.config;
  return solve_on_growth(v.v, p.domain, c.T, c.M, c.cg_tol, c.threads);
}

void fill_slice_stats(IterationRecord& rec, const GrowthSolution& u) {
  for (const SliceReport& r : u.reports) {
    rec.max_slice_residual = std::max(rec.max_slice_residual, r.residual);
    rec.cg_iterations += r.iterations;
  }
}

void fill_window_stats(IterationRecord& rec, const CouplingProblem& p, const AttachmentField& v) {
  const Grid& g = v.grid();
  const CouplingConfig& c = p.config;
  const double R = window_radius(g, c);
  const TheoryConstants k =
      theory_constants(p.domain, p.support.model().sigma_lower, p.support.model().sigma_upper, R);
  rec.c1 = k.c1;
  rec.v_max = 0.0;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (!v.v.has(n)) continue;
    if (g.position(n).norm() <= R) rec.v_max = std::max(rec.v_max, v.v[n]);
    if (v.v[n] > c.T) ++rec.beyond_horizon;
  }
  rec.containment_excess = -std::numeric_limits<double>::infinity();
  for (int m = 1; m <= c.M; ++m) {
    const double t = c.T * m / c.M;
    double rmax = 0.0;
    for (NodeId n : sublevel(v.v, t).members()) rmax = std::max(rmax, g.position(n).norm());
    rec.containment_excess = std::max(rec.containment_excess, rmax - c3(k, t));
  }
  rec.containment_pass = rec.containment_excess <= g.spacing();
  if (!rec.containment_pass)
    log_warning("iterate " + std::to_string(rec.j) + " leaves the containment ball by " +
                std::to_string(rec.containment_excess));
}

}  // namespace

std::vector<Issue> CouplingConfig::validate() const {
  std::vector<Issue> out;
  auto add = [&](const char* what) { out.push_back({"coupling-config", what}); };
  if (!(T > 0.0) || !std::isfinite(T)) add("time horizon T must be positive and finite");
  if (M < 1) add("M must be at least 1");
  if (!(tol > 0.0)) add("tol must be positive");
  if (max_iter < 2) add("max_iter must be at least 2");
  if (!(theta > 0.0 && theta <= 1.0)) add("under-relaxation theta must lie in (0, 1]");
  if (stencil_radius < 1 || stencil_radius > 3) add("stencil_radius must be 1, 2 or 3");
  if (!(cg_tol > 0.0)) add("cg_tol must be positive");
  if (threads < 1) add("threads must be at least 1");
  if (std::isnan(R)) add("window radius R must be a number");
  return out;
}

double window_radius(const Grid& grid, const CouplingConfig& config) {
  if (config.R > 0.0) return config.R;
  double r = 0.0;
  for (NodeId n = 0; n < grid.size(); ++n) r = std::max(r, grid.position(n).norm());
  return r;
}

std::vector<Issue> window_warnings(const DomainSpec& domain, double sigma_lower, double sigma_upper,
                                   const CouplingConfig& config) {
  std::vector<Issue> out;
  const Grid& g = domain.grid();
  bool touches = false;
  for (NodeId n : domain.omega.members()) touches = touches || g.on_frame(n);
  if (!touches) return out;
  // Largest ball around the origin that the grid box contains.
  double inner = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim(); ++a) {
    const double lo = g.origin()[a];
    const double hi = lo + g.spacing() * (g.shape()[a] - 1);
    inner = std::min({inner, -lo, hi});
  }
  const TheoryConstants k = theory_constants(domain, sigma_lower, sigma_upper, window_radius(g, config));
  const double reach = c3(k, config.T);
  if (reach > inner)
    out.push_back({"window-containment", "omega reaches the grid frame and c3(T) = " + std::to_string(reach) +
                                             " exceeds the inscribed window radius " + std::to_string(inner)});
  return out;
}

std::string to_string(Verdict v) { return v == Verdict::converged ? "converged" : "max-iter-reached"; }

CoupledState initialize(const CouplingProblem& p) {
  const auto t0 = std::chrono::steady_clock::now();
  CoupledState s;
  s.j = 0;
  s.activation = Eigen::VectorXd::Zero(p.domain.grid().size());
  s.v = solve_attachment(p.domain, metric_for(p, s.activation), p.config.stencil_radius);
  s.u = grow(p, s.v);
  s.ku = convolve(s.u.u, p.kernels, p.config.threads);
  IterationRecord rec;
  rec.j = 0;
  fill_slice_stats(rec, s.u);
  fill_window_stats(rec, p, s.v);
  rec.seconds = seconds_since(t0);
  s.history.push_back(std::move(rec));
  return s;
}

Eigen::VectorXd next_activation(const CouplingProblem& p, const CoupledState& s) {
  const Eigen::VectorXd fresh = compose(s.ku, s.v.v, 0.0, p.config.past_horizon);
  if (p.config.theta == 1.0) return fresh;
  return p.config.theta * fresh + (1.0 - p.config.theta) * s.activation;
}

CoupledState step(const CouplingProblem& p, const CoupledState& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const CouplingConfig& c = p.config;
  const Grid& g = p.domain.grid();
  CoupledState next;
  next.j = s.j + 1;
  next.activation = next_activation(p, s);
  next.v = solve_attachment(p.domain, metric_for(p, next.activation), c.stencil_radius);
  next.u = grow(p, next.v);
  next.ku = convolve(next.u.u, p.kernels, c.threads);
  next.history = s.history;

  IterationRecord rec;
  rec.j = next.j;
  rec.delta = sup_difference(next.v.v, s.v.v, window_radius(g, c));
  const double sigma_lower = p.support.model().sigma_lower;
  for (int m = 1; m <= c.M; ++m) {
    HausdorffDelta d;
    d.t = c.T * m / c.M;
    d.distance = hausdorff(sublevel(next.v.v, d.t), sublevel(s.v.v, d.t));
    d.bound = rec.delta / sigma_lower + 2.0 * g.spacing();
    d.pass = d.distance <= d.bound;
    rec.hausdorff.push_back(d);
  }
  fill_slice_stats(rec, next.u);
  fill_window_stats(rec, p, next.v);
  rec.seconds = seconds_since(t0);
  next.history.push_back(std::move(rec));
  return next;
}

CouplingResult run(const CouplingProblem& p, const CouplingObserver& observer) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!p.domain.validate().empty()) throw ValidationError("invalid domain: " + p.domain.validate().front().message);
  if (!p.config.validate().empty()) throw ValidationError("invalid coupling config: " + p.config.validate().front().message);
  if (p.config.theta != 1.0)
    log_info("under-relaxation theta = " + std::to_string(p.config.theta) + " deviates from the plain scheme");

  CouplingResult result;
  result.state = initialize(p);
  if (observer) observer(result.state);
  result.verdict = Verdict::max_iter_reached;
  while (result.state.j < p.config.max_iter) {
    result.state = step(p, result.state);
    if (observer) observer(result.state);
    if (result.state.history.back().delta < p.config.tol) {
      result.verdict = Verdict::converged;
      break;
    }
  }
  if (result.verdict == Verdict::converged) {
    // Plain composed activation of the final state: the fixed-point map itself.
    const MetricField frozen = metric_for(p, compose(result.state.ku, result.state.v.v, 0.0, p.config.past_horizon));
    result.representation_residual = representation_residual(p.domain, frozen, result.state.v,
                                                             window_radius(p.domain.grid(), p.config));
  } else {
    result.representation_residual = std::numeric_limits<double>::quiet_NaN();
  }
  result.seconds = seconds_since(t0);
  return result;
}

}  // namespace accreta

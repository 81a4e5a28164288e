#include "accreta/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "accreta/parallel.hpp"

namespace accreta {

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - w) * ys[i - 1] + w * ys[i];
}

void check_table(const std::vector<double>& xs, const std::vector<double>& ys, const char* what) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ValidationError(std::string(what) + " table needs >= 2 matching rows");
  if (xs.front() != 0.0) throw ValidationError(std::string(what) + " table must start at 0");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ValidationError(std::string(what) + " table has non-finite entries");
    if (ys[i] < 0.0) throw ValidationError(std::string(what) + " kernel must be nonnegative");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw ValidationError(std::string(what) + " table abscissae must increase");
  }
}

}  // namespace

TimeKernel TimeKernel::exponential(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("exponential kernel rate must be positive");
  TimeKernel k;
  k.lambda_ = lambda;
  return k;
}

TimeKernel TimeKernel::table(std::vector<double> s, std::vector<double> k) {
  check_table(s, k, "time kernel");
  TimeKernel out;
  out.exponential_ = false;
  out.s_ = std::move(s);
  out.k_ = std::move(k);
  return out;
}

double TimeKernel::operator()(double s) const {
  if (exponential_) return lambda_ * std::exp(-lambda_ * s);
  return interpolate(s_, k_, s);
}

double TimeKernel::horizon() const { return exponential_ ? std::numeric_limits<double>::infinity() : s_.back(); }

double TimeKernel::l1_norm() const {
  if (exponential_) return 1.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < s_.size(); ++i) sum += 0.5 * (k_[i] + k_[i - 1]) * (s_[i] - s_[i - 1]);
  return sum;
}

double TimeKernel::total_variation() const {
  if (exponential_) return lambda_;
  double tv = 0.0;
  for (std::size_t i = 1; i < k_.size(); ++i) tv += std::abs(k_[i] - k_[i - 1]);
  return tv;
}

SpatialKernel SpatialKernel::gaussian(double width, double radius) {
  if (!(width > 0.0)) throw ValidationError("Gaussian width must be positive");
  SpatialKernel k;
  k.width_ = width;
  k.radius_ = radius > 0.0 ? radius : 4.0 * width;
  return k;
}

SpatialKernel SpatialKernel::radial_table(std::vector<double> r, std::vector<double> phi) {
  check_table(r, phi, "spatial kernel");
  SpatialKernel k;
  k.gaussian_ = false;
  k.radius_ = r.back();
  k.r_ = std::move(r);
  k.phi_ = std::move(phi);
  return k;
}

double SpatialKernel::profile(double r, int dim) const {
  if (gaussian_) {
    if (r > radius_) return 0.0;
    return std::pow(2.0 * std::numbers::pi * width_ * width_, -0.5 * dim) * std::exp(-0.5 * r * r / (width_ * width_));
  }
  if (r > radius_) return 0.0;
  return interpolate(r_, phi_, r);
}

double SpatialKernel::integral(int dim) const {
  if (gaussian_) return 1.0;
  // Piecewise linear phi times r^(dim-1) is at most cubic: Simpson is exact per segment.
  const double surface = dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  auto f = [&](double r) { return profile(r, dim) * std::pow(r, dim - 1); };
  double sum = 0.0;
  for (std::size_t i = 1; i < r_.size(); ++i) {
    const double a = r_[i - 1], b = r_[i];
    sum += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return surface * sum;
}

SpatialStencil make_spatial_stencil(const SpatialKernel& phi, const Grid& grid) {
  const double h = grid.spacing();
  const double vol = grid.cell_volume();
  const int reach = static_cast<int>(std::floor(phi.radius() / h));
  const int zr = grid.dim() == 3 ? reach : 0;
  SpatialStencil st;
  double sum = 0.0;
  for (int k = -zr; k <= zr; ++k)
    for (int j = -reach; j <= reach; ++j)
      for (int i = -reach; i <= reach; ++i) {
        const double r = h * std::sqrt(static_cast<double>(i * i + j * j + k * k));
        const double w = phi.profile(r, grid.dim()) * vol;
        if (!(w > 0.0)) continue;
        st.offsets.push_back({i, j, k});
        st.weights.push_back(w);
        sum += w;
      }
  if (!(sum > 0.0)) throw ValidationError("spatial kernel has no mass on the grid");
  const double scale = phi.integral(grid.dim()) / sum;
  double sq = 0.0;
  for (double& w : st.weights) {
    w *= scale;
    sq += w * w / vol;
  }
  st.l2_norm = std::sqrt(sq);
  return st;
}

Eigen::VectorXd convolve_space(const ScalarField& slice, const SpatialStencil& stencil) {
  const Grid& g = slice.grid();
  const Eigen::VectorXd ext = slice.extended(0.0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  const Index3 shape = g.shape();
  // Scatter from supported nodes only; slices are often much smaller than the grid.
  for (NodeId n = 0; n < g.size(); ++n) {
    const double un = ext[n];
    if (un == 0.0) continue;
    const Index3 idx = g.index(n);
    for (std::size_t s = 0; s < stencil.offsets.size(); ++s) {
      const Index3& o = stencil.offsets[s];
      const Index3 x{idx[0] + o[0], idx[1] + o[1], idx[2] + o[2]};
      if (x[0] < 0 || x[1] < 0 || x[2] < 0 || x[0] >= shape[0] || x[1] >= shape[1] || x[2] >= shape[2]) continue;
      out[g.node(x)] += stencil.weights[s] * un;
    }
  }
  return out;
}

ActivationTrace convolve(const TimeField& u, const KernelPair& kp, int threads) {
  if (u.times.empty() || u.times.size() != u.slices.size()) throw ValidationError("time field has no slices");
  const double T = u.times.back();
  if (u.times.size() > 1 && !(u.dt() > 0.0)) throw ValidationError("time step must be positive");
  if (kp.k.horizon() < T * (1.0 - 1e-12)) throw ValidationError("kernel horizon shorter than the time horizon");
  const SpatialStencil stencil = make_spatial_stencil(kp.phi, u.grid);
  const std::size_t count = u.times.size();

  std::vector<Eigen::VectorXd> spatial(count);
  parallel_for(count, threads, [&](std::size_t l) {
    for (NodeId n = 0; n < u.grid.size(); ++n)
      if (u.slices[l].has(n) && !std::isfinite(u.slices[l][n])) throw SolverError("non-finite slice value");
    spatial[l] = convolve_space(u.slices[l], stencil);
  });

  ActivationTrace out{u.grid, u.times, std::vector<Eigen::VectorXd>(count)};
  parallel_for(count, threads, [&](std::size_t m) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.grid.size());
    for (std::size_t l = 0; m > 0 && l <= m; ++l) {
      const double left = l > 0 ? u.times[l] - u.times[l - 1] : 0.0;
      const double right = l < m ? u.times[l + 1] - u.times[l] : 0.0;
      const double w = 0.5 * (left + right);
      acc.noalias() += (w * kp.k(u.times[m] - u.times[l])) * spatial[l];
    }
    out.values[m] = std::move(acc);
  });
  return out;
}

double sample_composed(const ActivationTrace& a, const ScalarField& v, NodeId x) {
  if (!v.has(x)) throw SolverError("composed sample at a node without a finite attachment time");
  const double t = v[x];
  const double T = a.horizon();
  if (t > T * (1.0 + 1e-12) + 1e-300) throw SolverError("time horizon exceeded");
  if (t <= a.times.front()) return a.values.front()[x];
  if (t >= T) return a.values.back()[x];
  const auto it = std::upper_bound(a.times.begin(), a.times.end(), t);
  const std::size_t m = static_cast<std::size_t>(it - a.times.begin()) - 1;
  const double frac = (t - a.times[m]) / (a.times[m + 1] - a.times[m]);
  if (frac == 0.0) return a.values[m][x];
  return (1.0 - frac) * a.values[m][x] + frac * a.values[m + 1][x];
}

Eigen::VectorXd compose(const ActivationTrace& a, const ScalarField& v, double fill, HorizonPolicy policy) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(a.grid.size(), fill);
  const double T = a.horizon();
  for (NodeId n = 0; n < a.grid.size(); ++n) {
    if (!v.has(n)) continue;
    if (policy == HorizonPolicy::hold && v[n] > T) out[n] = a.values.back()[n];
    else out[n] = sample_composed(a, v, n);
  }
  return out;
}

double max_slice_l2(const TimeField& u) {
  double best = 0.0;
  for (const auto& s : u.slices) best = std::max(best, std::sqrt(s.extended(0.0).squaredNorm() * u.grid.cell_volume()));
  return best;
}

double time_lipschitz_bound(const KernelPair& kp, const SpatialStencil& stencil, double sup_l2) {
  return (std::abs(kp.k(0.0)) + kp.k.total_variation()) * stencil.l2_norm * sup_l2;
}

double uniform_bound(const KernelPair& kp, const SpatialStencil& stencil, double sup_l2, double dt) {
  return stencil.l2_norm * (kp.k.l1_norm() + 0.5 * dt * kp.k.total_variation()) * sup_l2;
}

double measured_time_lipschitz(const ActivationTrace& a) {
  double best = 0.0;
  for (std::size_t m = 0; m + 1 < a.times.size(); ++m) {
    const double dt = a.times[m + 1] - a.times[m];
    best = std::max(best, (a.values[m + 1] - a.values[m]).cwiseAbs().maxCoeff() / dt);
  }
  return best;
}

}  // namespace accreta

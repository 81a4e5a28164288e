#ifndef ACCRETA_CONVOLUTION_HPP
#define ACCRETA_CONVOLUTION_HPP

#include <vector>

#include "accreta/elliptic.hpp"
#include "accreta/grid.hpp"

namespace accreta {

/// Memory kernel k(s) >= 0 on s >= 0.
class TimeKernel {
 public:
  /// lambda e^{-lambda s}.
  static TimeKernel exponential(double lambda);
  /// Piecewise linear through (s_i, k_i) with s_0 = 0; undefined beyond the last abscissa.
  static TimeKernel table(std::vector<double> s, std::vector<double> k);

  double operator()(double s) const;
  /// Largest s where k is defined (infinite for the exponential family).
  double horizon() const;
  double l1_norm() const;
  /// ||k'||_{L^1}, i.e. the total variation.
  double total_variation() const;

 private:
  bool exponential_ = true;
  double lambda_ = 1.0;
  std::vector<double> s_, k_;
};

/// Radial spatial kernel phi(|z|) >= 0 with compact (truncated) support.
class SpatialKernel {
 public:
  /// Normalized Gaussian of standard deviation `width`, truncated at `radius` (4 width when <= 0).
  static SpatialKernel gaussian(double width, double radius = 0.0);
  /// Piecewise linear radial profile through (r_i, phi_i), zero beyond the last radius.
  static SpatialKernel radial_table(std::vector<double> r, std::vector<double> phi);

  /// phi at radius r (zero beyond the truncation radius).
  double profile(double r, int dim) const;
  double radius() const { return radius_; }
  /// Integral of the untruncated kernel over R^dim.
  double integral(int dim) const;

 private:
  bool gaussian_ = true;
  double width_ = 1.0;
  double radius_ = 4.0;
  std::vector<double> r_, phi_;
};

struct KernelPair {
  TimeKernel k = TimeKernel::exponential(1.0);
  SpatialKernel phi = SpatialKernel::gaussian(1.0);
};

/// Lattice weights phi(z) h^dim over the truncated support, rescaled to the kernel integral.
struct SpatialStencil {
  std::vector<Index3> offsets;
  std::vector<double> weights;
  /// Discrete L^2 norm of phi: sqrt(sum (w/h^dim)^2 h^dim).
  double l2_norm = 0.0;
};

SpatialStencil make_spatial_stencil(const SpatialKernel& phi, const Grid& grid);

/// Ku on every grid node at the time samples of the source TimeField.
struct ActivationTrace {
  Grid grid;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

/// Spatial convolution of one slice's zero extension with the stencil.
Eigen::VectorXd convolve_space(const ScalarField& slice, const SpatialStencil& stencil);

/**
 * Ku(x,t_m) = trapezoid over l <= m of k(t_m - t_l) (phi * u_l)(x), where u_l is
 * the zero extension of slice l. Target times are independent and may run on
 * several threads.
 */
ActivationTrace convolve(const TimeField& u, const KernelPair& kp, int threads = 1);

/// Ku(x, v(x)) by linear interpolation in time; throws past the trace horizon.
double sample_composed(const ActivationTrace& a, const ScalarField& v, NodeId x);

/// What compose does at nodes with v(x) beyond the trace horizon.
enum class HorizonPolicy {
  error,
  /// Use Ku(x, T): such nodes lie outside every V(t) with t <= T.
  hold,
};

/// x -> Ku(x, v(x)) on the support of v, `fill` elsewhere.
Eigen::VectorXd compose(const ActivationTrace& a, const ScalarField& v, double fill = 0.0,
                        HorizonPolicy policy = HorizonPolicy::error);

/// sup over slices of the discrete L^2 norm of the zero extension.
double max_slice_l2(const TimeField& u);

/// (|k(0)| + ||k'||_{L^1}) ||phi||_{L^2} sup ||u||_{L^2}: bound on |Ku(t_{m+1}) - Ku(t_m)| / dt.
double time_lipschitz_bound(const KernelPair& kp, const SpatialStencil& stencil, double sup_l2);

/// Bound on sup |Ku| for trapezoid quadrature at step dt: ||phi||_{L^2} (||k||_{L^1} + dt TV(k)/2) sup ||u||_{L^2}.
double uniform_bound(const KernelPair& kp, const SpatialStencil& stencil, double sup_l2, double dt);

/// max over m, x of |Ku(x,t_{m+1}) - Ku(x,t_m)| / dt.
double measured_time_lipschitz(const ActivationTrace& a);

}  // namespace accreta

#endif  // ACCRETA_CONVOLUTION_HPP
